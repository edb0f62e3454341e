//! Relative class numbers of the imaginary subfields of `ℚ(ζ_p)` and the
//! upper bounds obtained from exact mean square values.
//!
//! For `K ⊆ ℚ(ζ_p)` of even degree `m`, the odd characters of `K` are those
//! trivial on the subgroup `H` of order `(p-1)/m`. The analytic route computes
//!
//! ```text
//! h⁻ = Q w / (2π)^n · √(d_K / d_K⁺) · ∏_{χ ∈ X_p⁻(H)} L(1, χ),   n = m/2,
//! ```
//!
//! in extended precision and rounds; the arithmetic route
//! [`bernoulli_relative_class_number`] evaluates `Q w ∏ (-B_{1,χ}/2)` exactly
//! as the determinant of a negacyclic integer matrix. Only `(p-1)/m` odd is
//! supported: otherwise `-1 ∈ H` and `K` is real.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, mul_mod, smallest_primitive_root};
use crate::mean_square::{euler_correction_pi, mean_square_exact};
use crate::units::{subgroup_of_order, Subgroup};
use crate::{Error, ExactRational, Result};

/// Working precision of the analytic evaluation, in bits (about 77 digits).
pub const DEFAULT_PRECISION_BITS: usize = 256;
/// Largest conductor inside the documented precision budget.
pub const MAX_CONDUCTOR: u64 = 200;
/// Largest accepted distance between the analytic value and its rounding.
pub const ROUNDING_TOLERANCE: f64 = 1e-4;

const RM: RoundingMode = RoundingMode::ToEven;

/// Invariants of an imaginary subfield `K ⊆ ℚ(ζ_p)` of degree `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldContext {
    pub p: u64,
    pub m: u64,
    pub n: u64,
    /// Hasse unit index, `1` for cyclic fields.
    pub q_k: u32,
    /// Number of roots of unity: `2p` for `ℚ(ζ_p)` itself, `2` otherwise.
    pub w_k: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub d_k: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub d_k_plus: BigUint,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl FieldContext {
    pub fn new(p: u64, m: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not an odd prime")));
        }
        if m == 0 || m % 2 != 0 || (p - 1) % m != 0 {
            return Err(Error::invalid(format!("degree {m} must be an even divisor of {}", p - 1)));
        }
        if ((p - 1) / m) % 2 == 0 {
            return Err(Error::invalid(format!(
                "degree {m} field of conductor {p} is real: (p-1)/m = {} is even",
                (p - 1) / m
            )));
        }
        let pb = BigUint::from(p);
        Ok(FieldContext {
            p,
            m,
            n: m / 2,
            q_k: 1,
            w_k: if m == p - 1 { 2 * p } else { 2 },
            d_k: pb.pow((m - 1) as u32),
            d_k_plus: pb.pow((m / 2 - 1) as u32),
        })
    }

    /// The subgroup `H` of order `(p-1)/m` fixing `K`.
    pub fn subgroup(&self) -> Result<Subgroup> {
        subgroup_of_order((self.p - 1) / self.m, self.p)
    }
}

/// Result of the analytic evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassNumberValue {
    #[serde(serialize_with = "ser_biguint")]
    pub h_minus: BigUint,
    /// Distance between the analytic value and `h_minus`.
    pub residual: f64,
    pub precision_bits: usize,
}

/// `ind(a)` for `1 ≤ a < p`, relative to the smallest primitive root.
fn index_table(p: u64) -> Result<Vec<u64>> {
    let g = smallest_primitive_root(p)?;
    let mut ind = vec![0u64; p as usize];
    let mut x = 1u64;
    for k in 0..p - 1 {
        ind[x as usize] = k;
        x = mul_mod(x, g, p);
    }
    Ok(ind)
}

fn big(n: u64, bits: usize) -> BigFloat {
    BigFloat::from_u64(n, bits)
}

fn check_float(x: &BigFloat, what: &str) -> Result<()> {
    if x.is_nan() || x.is_inf() {
        return Err(Error::Precision(format!("{what} is not finite")));
    }
    Ok(())
}

/// Leading bits of a finite `BigFloat` as an `f64`.
pub(crate) fn big_to_f64(x: &BigFloat) -> f64 {
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let len = words.len();
    if len == 0 || words.iter().all(|&w| w == 0) {
        return 0.0;
    }
    let top = words[len - 1] as f64;
    let next = if len >= 2 { words[len - 2] as f64 } else { 0.0 };
    let mantissa = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let v = mantissa * 2f64.powi(e);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Exact value of a non-negative integer-valued `BigFloat`.
fn big_to_biguint(x: &BigFloat) -> Option<BigUint> {
    if x.is_zero() {
        return Some(BigUint::zero());
    }
    let (words, _, sign, e, _) = x.as_raw_parts()?;
    if sign == Sign::Neg {
        return None;
    }
    let mut m = BigUint::zero();
    for &w in words.iter().rev() {
        m = (m << 64u32) + BigUint::from(w);
    }
    let shift = e as i64 - 64 * words.len() as i64;
    Some(if shift >= 0 { m << shift as u64 } else { m >> (-shift) as u64 })
}

/// `h⁻(K)` for the degree-`m` imaginary subfield of `ℚ(ζ_p)`.
pub fn relative_class_number(p: u64, m: u64) -> Result<BigUint> {
    Ok(relative_class_number_with(p, m, DEFAULT_PRECISION_BITS)?.h_minus)
}

/// As [`relative_class_number`], with an explicit working precision.
pub fn relative_class_number_with(p: u64, m: u64, bits: usize) -> Result<ClassNumberValue> {
    let ctx = FieldContext::new(p, m)?;
    if p > MAX_CONDUCTOR {
        return Err(Error::Precision(format!("conductor {p} exceeds the budget p ≤ {MAX_CONDUCTOR}")));
    }
    if bits < 64 {
        return Err(Error::Precision(format!("working precision {bits} bits is below 64")));
    }
    let bits = bits + 64; // guard bits
    let mut cc = Consts::new().map_err(|e| Error::Precision(format!("constant cache: {e:?}")))?;
    let pi = cc.pi(bits, RM);
    let ind = index_table(p)?;

    // C_k = Σ_{ind(a) ≡ k (mod m)} cot(πa/p)
    let mut classes = vec![BigFloat::from_u64(0, bits); m as usize];
    for a in 1..p {
        let theta = pi.mul(&big(a, bits), bits, RM).div(&big(p, bits), bits, RM);
        let cot = theta.cos(bits, RM, &mut cc).div(&theta.sin(bits, RM, &mut cc), bits, RM);
        let k = (ind[a as usize] % m) as usize;
        classes[k] = classes[k].add(&cot, bits, RM);
    }

    // ∏_{j odd} Σ_k ζ_m^{jk} C_k, as a complex number.
    let two_pi = pi.mul(&big(2, bits), bits, RM);
    let mut re = big(1, bits);
    let mut im = big(0, bits);
    for j in (1..m).step_by(2) {
        let mut sr = big(0, bits);
        let mut si = big(0, bits);
        for (k, c) in classes.iter().enumerate() {
            let r = (j * k as u64) % m;
            let angle = two_pi.mul(&big(r, bits), bits, RM).div(&big(m, bits), bits, RM);
            sr = sr.add(&c.mul(&angle.cos(bits, RM, &mut cc), bits, RM), bits, RM);
            si = si.add(&c.mul(&angle.sin(bits, RM, &mut cc), bits, RM), bits, RM);
        }
        let nr = re.mul(&sr, bits, RM).sub(&im.mul(&si, bits, RM), bits, RM);
        let ni = re.mul(&si, bits, RM).add(&im.mul(&sr, bits, RM), bits, RM);
        re = nr;
        im = ni;
    }
    // Each L(1, χ) carries π/(2p); together with 1/(2π)^n and √p^n this
    // leaves Q w / (4p)^n · p^(n/2).
    let n = ctx.n as usize;
    let sqrt_p = big(p, bits).sqrt(bits, RM);
    let scale = big(ctx.q_k as u64 * ctx.w_k, bits)
        .mul(&sqrt_p.powi(n, bits, RM), bits, RM)
        .div(&big(4 * p, bits).powi(n, bits, RM), bits, RM);
    let value = re.mul(&scale, bits, RM);
    let imag = im.mul(&scale, bits, RM);
    check_float(&value, "h⁻")?;
    let half = BigFloat::from_f64(0.5, bits);
    let rounded = value.add(&half, bits, RM).floor();
    let residual = big_to_f64(&value.sub(&rounded, bits, RM)).abs();
    let imag_abs = big_to_f64(&imag).abs();
    if residual.is_nan() || imag_abs.is_nan() || residual >= ROUNDING_TOLERANCE || imag_abs >= ROUNDING_TOLERANCE {
        return Err(Error::Precision(format!(
            "h⁻ for (p, m) = ({p}, {m}) is {:.6e} + {:.3e}i, not within {ROUNDING_TOLERANCE} of an integer",
            big_to_f64(&value),
            imag_abs
        )));
    }
    let h_minus = big_to_biguint(&rounded)
        .ok_or_else(|| Error::Precision("h⁻ did not round to an integer".into()))?;
    if h_minus.is_zero() {
        return Err(Error::invariant(format!("h⁻ for (p, m) = ({p}, {m}) rounded to 0")));
    }
    Ok(ClassNumberValue {
        h_minus,
        residual,
        precision_bits: bits - 64,
    })
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `h⁻(K)` from generalized Bernoulli numbers, in exact integer arithmetic.
///
/// With `A_k = Σ_{ind(a) ≡ k (mod m)} a` and `b_i = A_i - A_{i+n}`, the
/// product `∏_χ Σ_a χ(a) a` over the odd characters equals the determinant
/// of multiplication by `Σ b_i x^i` on `ℤ[x]/(x^n + 1)`.
pub fn bernoulli_relative_class_number(p: u64, m: u64) -> Result<BigUint> {
    let ctx = FieldContext::new(p, m)?;
    if p > 5_000 {
        return Err(Error::invalid(format!("exact determinant limited to p ≤ 5000, got {p}")));
    }
    let ind = index_table(p)?;
    let n = ctx.n as usize;
    let mut sums = vec![BigInt::zero(); m as usize];
    for a in 1..p {
        sums[(ind[a as usize] % m) as usize] += a;
    }
    let b: Vec<BigInt> = (0..n).map(|i| &sums[i] - &sums[i + n]).collect();
    let matrix: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i >= j { b[i - j].clone() } else { -b[n + i - j].clone() })
                .collect()
        })
        .collect();
    let det = bareiss_determinant(matrix);
    let numer = det * BigInt::from(ctx.q_k as u64 * ctx.w_k);
    let denom = BigInt::from(-2 * p as i64).pow(n as u32);
    let (h, r) = numer.div_rem(&denom);
    if !r.is_zero() || !h.is_positive() {
        return Err(Error::invariant(format!(
            "Bernoulli evaluation for (p, m) = ({p}, {m}) gave {numer}/{denom}"
        )));
    }
    Ok(h.to_biguint().expect("positive"))
}

/// `w (p c / 4)^{m/4}` where `M(p, H) = c π²`.
pub fn bound_from_coefficient(p: u64, m: u64, coef: &ExactRational) -> Result<f64> {
    let ctx = FieldContext::new(p, m)?;
    let base = (ExactRational::from_integer(p) * coef * ExactRational::ratio(1u32, 4u32)).to_f64();
    Ok(ctx.w_k as f64 * base.powf(m as f64 / 4.0))
}

/// `h⁻(K) ≤ w (p M(p, H) / 4π²)^{m/4}` with the exact mean square.
pub fn upper_bound_subfield(p: u64, m: u64) -> Result<f64> {
    let ctx = FieldContext::new(p, m)?;
    let coef = mean_square_exact(&ctx.subgroup()?)?;
    bound_from_coefficient(p, m, coef.coef())
}

/// `2p (p/24)^{(p-1)/4}`, the simplified bound for `ℚ(ζ_p)`.
pub fn cyclotomic_simplified_bound(p: u64) -> f64 {
    2.0 * p as f64 * (p as f64 / 24.0).powf((p - 1) as f64 / 4.0)
}

/// The two bounds for the degree `(p-1)/3` field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H3Bounds {
    /// `2 (p M(p, H₃) / 4π²)^{(p-1)/12} = 2((p-1)/24)^{(p-1)/12}`.
    pub m_based: f64,
    /// `2 (p/24)^{(p-1)/12}`.
    pub simplified: f64,
}

pub fn upper_bound_h3_field(p: u64) -> Result<H3Bounds> {
    if p % 6 != 1 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not a prime ≡ 1 (mod 6)")));
    }
    let m = (p - 1) / 3;
    let h3 = subgroup_of_order(3, p)?;
    let coef = mean_square_exact(&h3)?;
    let expected = ExactRational::ratio(p - 1, 6 * p as u128);
    if coef.coef() != &expected {
        return Err(Error::invariant(format!(
            "M(p, H₃) = {}·π², expected {expected}·π²",
            coef.coef()
        )));
    }
    let m_based = bound_from_coefficient(p, m, coef.coef())?;
    let simplified = 2.0 * (p as f64 / 24.0).powf((p - 1) as f64 / 12.0);
    if m_based > simplified {
        return Err(Error::invariant(format!("bound chain broken at p = {p}: {m_based} > {simplified}")));
    }
    Ok(H3Bounds { m_based, simplified })
}

/// `(Q w / Π(f, H)) · √(d_K/d_K⁺) · (M(f, H)/4π²)^{n/2}` with `n = #X_f⁻(H)`.
pub fn general_bound(h: &Subgroup, q_k: u32, w_k: u64, d_ratio_sqrt: f64) -> Result<f64> {
    if !(q_k == 1 || q_k == 2) {
        return Err(Error::invalid(format!("Hasse unit index must be 1 or 2, got {q_k}")));
    }
    let coef = mean_square_exact(h)?;
    let pi = euler_correction_pi(h)?;
    let f = h.modulus();
    let n = crate::arith::totient(f)? / (2 * h.order());
    let base = (coef.coef() * &ExactRational::ratio(1u32, 4u32))
        .to_f64()
        .powf(n as f64 / 2.0);
    Ok(q_k as f64 * w_k as f64 / pi * d_ratio_sqrt * base)
}

/// `h⁻` together with the applicable bounds, as reported by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassNumberReport {
    pub p: u64,
    pub degree: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub h_minus: BigUint,
    pub bound_eq10: f64,
    pub bound_eq12_or_13: f64,
    pub satisfied: bool,
}

pub fn class_number_report(p: u64, m: u64) -> Result<ClassNumberReport> {
    let h_minus = relative_class_number(p, m)?;
    let bound_eq10 = upper_bound_subfield(p, m)?;
    let simplified = if m == p - 1 {
        cyclotomic_simplified_bound(p)
    } else if 3 * m == p - 1 {
        upper_bound_h3_field(p)?.simplified
    } else {
        f64::NAN
    };
    let h = h_minus.to_f64().unwrap_or(f64::INFINITY);
    let satisfied = h <= bound_eq10 * (1.0 + 1e-12) && (simplified.is_nan() || bound_eq10 <= simplified * (1.0 + 1e-12));
    Ok(ClassNumberReport {
        p,
        degree: m,
        h_minus,
        bound_eq10,
        bound_eq12_or_13: simplified,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_context() {
        let k = FieldContext::new(23, 22).unwrap();
        assert_eq!((k.n, k.q_k, k.w_k), (11, 1, 46));
        assert_eq!(k.d_k, BigUint::from(23u32).pow(21));
        assert_eq!(k.d_k_plus, BigUint::from(23u32).pow(10));
        assert_eq!(FieldContext::new(13, 4).unwrap().w_k, 2);
        assert!(FieldContext::new(13, 6).is_err());
        assert!(FieldContext::new(13, 3).is_err());
        assert!(FieldContext::new(15, 2).is_err());
    }

    #[test]
    fn small_class_numbers() {
        assert_eq!(relative_class_number(7, 6).unwrap(), BigUint::from(1u32));
        assert_eq!(relative_class_number(13, 4).unwrap(), BigUint::from(1u32));
        let v = relative_class_number_with(23, 22, DEFAULT_PRECISION_BITS).unwrap();
        assert_eq!(v.h_minus, BigUint::from(3u32));
        assert!(v.residual < 1e-30);
    }

    #[test]
    fn cyclotomic_table() {
        for (p, h) in [(29u64, 8u32), (31, 9), (37, 37), (41, 121), (43, 211), (47, 695)] {
            assert_eq!(relative_class_number(p, p - 1).unwrap(), BigUint::from(h), "p = {p}");
            assert_eq!(bernoulli_relative_class_number(p, p - 1).unwrap(), BigUint::from(h), "p = {p}");
        }
    }

    #[test]
    fn bernoulli_oracle() {
        assert_eq!(bernoulli_relative_class_number(7, 6).unwrap(), BigUint::from(1u32));
        assert_eq!(bernoulli_relative_class_number(23, 22).unwrap(), BigUint::from(3u32));
        // Imaginary quadratic fields: h(-p) for p ≡ 3 (mod 4).
        for (p, h) in [(7u64, 1u32), (11, 1), (19, 1), (23, 3), (31, 3), (43, 1), (47, 5), (71, 7), (163, 1)] {
            assert_eq!(bernoulli_relative_class_number(p, 2).unwrap(), BigUint::from(h), "p = {p}");
            assert_eq!(relative_class_number(p, 2).unwrap(), BigUint::from(h), "p = {p}");
        }
    }

    #[test]
    fn analytic_matches_bernoulli_for_all_subfields() {
        for p in crate::sieve::primes_up_to(110).into_iter().filter(|&p| p > 2) {
            for m in (2..p).step_by(2).filter(|m| (p - 1) % m == 0 && ((p - 1) / m) % 2 == 1) {
                assert_eq!(
                    relative_class_number(p, m).unwrap(),
                    bernoulli_relative_class_number(p, m).unwrap(),
                    "p = {p}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn precision_budget() {
        assert!(matches!(relative_class_number(211, 210), Err(Error::Precision(_))));
        assert!(relative_class_number_with(23, 22, 32).is_err());
    }

    #[test]
    fn subfield_bounds() {
        assert_eq!(upper_bound_subfield(13, 4).unwrap(), 1.0);
        let b = upper_bound_subfield(23, 22).unwrap();
        assert!(b >= 3.0 && b <= cyclotomic_simplified_bound(23));
        assert!((b - 17.28).abs() < 0.01, "{b}");
        for p in [7u64, 11, 13, 19, 23] {
            let h = relative_class_number(p, p - 1).unwrap().to_f64().unwrap();
            assert!(h <= upper_bound_subfield(p, p - 1).unwrap());
            assert!(upper_bound_subfield(p, p - 1).unwrap() <= cyclotomic_simplified_bound(p));
        }
    }

    #[test]
    fn h3_bounds() {
        let b = upper_bound_h3_field(13).unwrap();
        assert_eq!(b.m_based, 1.0);
        let b = upper_bound_h3_field(31).unwrap();
        assert!((b.m_based - 2.0 * 1.25f64.powf(2.5)).abs() < 1e-12);
        assert!(b.simplified <= 3.80 && b.simplified > 3.79);
        let mut last = 0.0;
        for p in crate::sieve::primes_up_to(400).into_iter().filter(|&p| p % 6 == 1 && p >= 31) {
            let b = upper_bound_h3_field(p).unwrap();
            assert!(b.simplified > last);
            last = b.simplified;
        }
        assert!(upper_bound_h3_field(11).is_err());
    }

    #[test]
    fn heuristic_coefficient_reproduces_expected_bound() {
        let sixth = ExactRational::ratio(1u32, 6u32);
        for (p, m) in [(13u64, 4u64), (31, 10), (43, 14), (61, 20)] {
            let b = bound_from_coefficient(p, m, &sixth).unwrap();
            let expected = 2.0 * (p as f64 / 24.0).powf(m as f64 / 4.0);
            assert!((b - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn general_bound_cases() {
        // Prime conductor: Π = 1 and the bound coincides with the subfield bound.
        let ctx = FieldContext::new(31, 10).unwrap();
        let h = ctx.subgroup().unwrap();
        let d = (ctx.p as f64).powf(ctx.n as f64 / 2.0);
        let g = general_bound(&h, 1, 2, d).unwrap();
        assert!((g - upper_bound_subfield(31, 10).unwrap()).abs() < 1e-9 * g);
        let h = Subgroup::cyclic(9, 91).unwrap();
        let g = general_bound(&h, 1, 2, 91f64.powf(3.0)).unwrap();
        assert!(g.is_finite() && g > 0.0);
        // Index-2 subgroup: a single character, exponent 1/2.
        let h = subgroup_of_order(5, 11).unwrap();
        let g = general_bound(&h, 1, 2, 11f64.sqrt()).unwrap();
        let coef = mean_square_exact(&h).unwrap().coef().to_f64();
        assert!((g - 2.0 * 11f64.sqrt() * (coef / 4.0).sqrt()).abs() < 1e-12);
        assert!(general_bound(&h, 3, 2, 1.0).is_err());
    }

    #[test]
    fn report() {
        let r = class_number_report(23, 22).unwrap();
        assert_eq!(r.h_minus, BigUint::from(3u32));
        assert!(r.satisfied);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["h_minus"], "3");
    }
}
