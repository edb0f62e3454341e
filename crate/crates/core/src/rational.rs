//! Arbitrary precision rationals kept in lowest terms.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A reduced fraction `numerator / denominator` with `denominator ≥ 1`.
///
/// Every arithmetic operation normalises its result, so equality is
/// structural and `is_integer` is a denominator check. The canonical zero is
/// `0/1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// Builds `num / den`, reducing to lowest terms.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(Self(BigRational::new(num.into(), den)))
    }

    /// `num / den` for denominators known to be non-zero.
    pub(crate) fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        debug_assert!(!den.is_zero());
        Self(BigRational::new(num.into(), den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self(self.0.recip()))
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| Self(&self.0 / &rhs.0))
    }

    /// Integer power with a possibly negative exponent.
    pub fn pow(&self, exp: i32) -> Option<Self> {
        if exp < 0 && self.is_zero() {
            return None;
        }
        Some(Self(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big_rational(self) -> BigRational {
        self.0
    }

    /// Fixed-point rendering with `places` digits after the point, rounded to
    /// nearest with ties away from zero.
    pub fn to_decimal(&self, places: usize) -> String {
        let scale = BigInt::from(10u32).pow(places as u32);
        let scaled = self.numer().abs() * &scale;
        let (q, r) = scaled.div_rem(self.denom());
        let q = if r * 2u32 >= *self.denom() { q + 1u32 } else { q };
        let digits = q.to_string();
        let sign = if self.is_negative() && !q.is_zero() { "-" } else { "" };
        if places == 0 {
            return format!("{sign}{digits}");
        }
        let padded = format!("{digits:0>width$}", width = places + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - places);
        format!("{sign}{int_part}.{frac_part}")
    }

    /// Rendering with at least `digits` significant digits.
    pub fn to_significant(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_owned();
        }
        // Number of decimal digits before the point, possibly ≤ 0.
        let abs = self.abs();
        let int_digits = abs.numer().div_floor(abs.denom());
        let places = if int_digits.is_zero() {
            // 10^k * |x| < 1 for k < leading zero count.
            let mut zeros = 0usize;
            let mut probe = abs.clone();
            let ten = Self::from_integer(10);
            while probe < Self::one() {
                probe = &probe * &ten;
                zeros += 1;
            }
            digits + zeros - 1
        } else {
            digits.saturating_sub(int_digits.to_string().len())
        };
        self.to_decimal(places)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, allow_sign: bool) -> Result<BigInt> {
    let digits = match s.strip_prefix('-') {
        Some(rest) if allow_sign => rest,
        Some(_) => return Err(Error::Parse(format!("unexpected sign in {s:?}"))),
        None => s,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal integer: {s:?}")));
    }
    let magnitude = BigInt::parse_bytes(digits.as_bytes(), 10)
        .ok_or_else(|| Error::Parse(format!("not a decimal integer: {s:?}")))?;
    Ok(if digits.len() != s.len() { -magnitude } else { magnitude })
}

/// Accepts `"num"` or `"num/den"` with an optional leading `-` on the
/// numerator and a positive denominator. Non-reduced input is normalised.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(Self::from_integer(parse_int(s, true)?)),
            Some((num, den)) => {
                let num = parse_int(num, true)?;
                let den = parse_int(den, false)?;
                if den.sign() != Sign::Plus {
                    return Err(Error::Parse(format!("denominator must be positive in {s:?}")));
                }
                Ok(Self(BigRational::new(num, den)))
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for ExactRational {
    fn add_assign(&mut self, rhs: ExactRational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&ExactRational> for ExactRational {
    fn sub_assign(&mut self, rhs: &ExactRational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a ExactRational> for ExactRational {
    fn sum<I: Iterator<Item = &'a ExactRational>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

/// `π²` to 64 decimal places, as an exact rational.
pub(crate) fn pi_squared_approx() -> ExactRational {
    const DIGITS: &str = "98696044010893586188344909998761511353136994072407906264133493762";
    let num = BigInt::parse_bytes(DIGITS.as_bytes(), 10).expect("constant digits");
    ExactRational::ratio(num, BigInt::from(10u32).pow(64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn display_lowest_terms() {
        assert_eq!(ExactRational::new(56, 108).unwrap().to_string(), "14/27");
        assert_eq!(ExactRational::new(-4, 2).unwrap().to_string(), "-2");
        assert_eq!(ExactRational::new(3, -6).unwrap().to_string(), "-1/2");
        assert_eq!(ExactRational::zero().to_string(), "0");
        assert_eq!(ExactRational::new(0, -5).unwrap().denom(), &BigInt::from(1));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "/", "1/", "/2", "1/0", "1/-2", "+1", "1 /2", "1/2/3", "--1", "0x10", "1.5", "-"] {
            assert!(bad.parse::<ExactRational>().is_err(), "{bad:?} accepted");
        }
        assert_eq!(r("-6/4").to_string(), "-3/2");
        assert_eq!(r("007").to_string(), "7");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(ExactRational::new(1, 0).is_err());
        assert!(ExactRational::one().checked_div(&ExactRational::zero()).is_none());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r("1/3").to_decimal(5), "0.33333");
        assert_eq!(r("2/3").to_decimal(5), "0.66667");
        assert_eq!(r("-1/8").to_decimal(2), "-0.13");
        assert_eq!(r("-1/1000").to_decimal(2), "0.00");
        assert_eq!(r("7").to_decimal(0), "7");
        assert_eq!(r("1/7").to_significant(3), "0.143");
        assert_eq!(r("1/700").to_significant(3), "0.00143");
        assert_eq!(r("1000/7").to_significant(5), "142.86");
    }

    #[test]
    fn pi_squared_digits() {
        let v = pi_squared_approx().to_f64();
        assert!((v - std::f64::consts::PI * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn serde_as_string() {
        let x = r("-22/91");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"-22/91\"");
        let back: ExactRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(n in any::<i64>(), d in 1i64..i64::MAX) {
            let x = ExactRational::new(n, d).unwrap();
            let back: ExactRational = x.to_string().parse().unwrap();
            prop_assert_eq!(&back, &x);
            let g = n.unsigned_abs().gcd(&d.unsigned_abs());
            prop_assert_eq!(x.denom(), &BigInt::from(d.unsigned_abs() / g));
        }
    }
}
