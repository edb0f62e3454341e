//! Primitive representations `f = a² + ab + b²`, the ratio set
//! `E_f = {a/b mod f}` and the order-3 subgroups `{1, a/b, b/a}` they generate.
//!
//! Each unit orbit of a primitive Eisenstein integer `a + bζ₆` of norm `f`
//! has exactly one member with `a, b > 0`, so the positive solutions of the
//! norm equation are a canonical set of orbit representatives.

use serde::Serialize;

use crate::arith::{factorize, gcd, inverse_mod, mul_mod, Factorization};
use crate::sieve::isqrt;
use crate::dedekind::{dedekind_sum, tilde_with};
use crate::units::Subgroup;
use crate::{Error, ExactRational, Result};

/// `a + bζ₆`, with norm `a² + ab + b²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EisensteinInteger {
    pub a: i64,
    pub b: i64,
}

impl EisensteinInteger {
    pub fn new(a: i64, b: i64) -> Self {
        EisensteinInteger { a, b }
    }

    pub fn norm(&self) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        a * a + a * b + b * b
    }
}

/// A ratio `r = a·b⁻¹ mod f` together with a witness representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RatioClass {
    pub modulus: u64,
    pub ratio: u64,
    pub witness: EisensteinInteger,
}

fn check_modulus(f: u64) -> Result<Factorization> {
    let fact = factorize(f)?;
    if f <= 3 || fact.primes().any(|p| p % 3 != 1) {
        return Err(Error::invalid(format!(
            "{f} has no primitive representation: every prime divisor must be ≡ 1 (mod 3)"
        )));
    }
    if f > 1 << 40 {
        return Err(Error::invalid(format!("representation search limited to f ≤ 2^40, got {f}")));
    }
    Ok(fact)
}

/// All `(a, b)` with `a, b > 0`, `gcd(a, b) = 1` and `a² + ab + b² = f`,
/// ordered by `b`. There are `2^t` of them, `t` the number of prime divisors.
pub fn representations(f: u64) -> Result<Vec<EisensteinInteger>> {
    check_modulus(f)?;
    Ok(positive_solutions(f))
}

fn positive_solutions(f: u64) -> Vec<EisensteinInteger> {
    let mut out = Vec::new();
    let f = f as u128;
    let mut b: u128 = 1;
    // 3b² ≤ 4f is needed for a real root.
    while 3 * b * b < 4 * f {
        // a = (-b + √(4f - 3b²)) / 2
        let disc = 4 * f - 3 * b * b;
        let root = isqrt(disc as u64) as u128;
        if root * root == disc && root > b && (root - b) % 2 == 0 {
            let a = (root - b) / 2;
            if gcd(a as u64, b as u64) == 1 {
                out.push(EisensteinInteger::new(a as i64, b as i64));
            }
        }
        b += 1;
    }
    out
}

/// `E_f`: the `2^t` ratios `a/b mod f`, ascending.
pub fn e_f(f: u64) -> Result<Vec<RatioClass>> {
    check_modulus(f)?;
    let mut out: Vec<RatioClass> = positive_solutions(f)
        .into_iter()
        .map(|w| {
            let inv = inverse_mod(w.b as u64 % f, f).expect("b is a unit when gcd(a, b) = 1");
            RatioClass {
                modulus: f,
                ratio: mul_mod(w.a as u64 % f, inv, f),
                witness: w,
            }
        })
        .collect();
    out.sort_by_key(|r| r.ratio);
    out.dedup_by_key(|r| r.ratio);
    Ok(out)
}

/// The `2^(t-1)` subgroups `{1, r, r⁻¹}` for `r ∈ E_f`.
pub fn order3_subgroups_from_ef(f: u64) -> Result<Vec<Subgroup>> {
    let mut subs: Vec<Subgroup> = e_f(f)?
        .into_iter()
        .map(|r| Subgroup::cyclic(r.ratio, f))
        .collect::<Result<_>>()?;
    subs.sort_by(|a, b| a.elements().cmp(b.elements()));
    subs.dedup();
    Ok(subs)
}

/// `(a′, b′)` of norm `δ`, primitive, with `a·b′ ≡ a′·b (mod δ)`.
pub fn divisor_descend(a: i64, b: i64, delta: u64) -> Result<EisensteinInteger> {
    let alpha = EisensteinInteger::new(a, b);
    let norm = alpha.norm();
    if norm <= 0 || gcd(a.unsigned_abs(), b.unsigned_abs()) != 1 {
        return Err(Error::invalid(format!("({a}, {b}) is not a primitive representation")));
    }
    if delta == 0 || norm % delta as i128 != 0 {
        return Err(Error::invalid(format!("{delta} does not divide {norm}")));
    }
    if delta as i128 == norm {
        return Ok(alpha);
    }
    if delta == 1 {
        return Ok(EisensteinInteger::new(1, 0));
    }
    let d = delta as i128;
    let (ar, br) = ((a as i128).rem_euclid(d), (b as i128).rem_euclid(d));
    positive_solutions(delta)
        .into_iter()
        .find(|w| (ar * w.b as i128 - w.a as i128 * br).rem_euclid(d) == 0)
        .ok_or_else(|| Error::invariant(format!("no descent of ({a}, {b}) to norm {delta}")))
}

/// `s(r, δ)` for `r ∈ E_f` and `δ | f`, checked against `(δ - 1)/(12δ)`;
/// also checks `s̃(r, f) = φ(f)/(12f)`.
pub fn dedekind_at_ratio(f: u64, delta: u64, r: &RatioClass) -> Result<ExactRational> {
    let fact = check_modulus(f)?;
    if r.modulus != f {
        return Err(Error::invalid(format!("ratio class has modulus {}, expected {f}", r.modulus)));
    }
    if delta == 0 || f % delta != 0 {
        return Err(Error::invalid(format!("{delta} does not divide {f}")));
    }
    let value = dedekind_sum((r.ratio % delta) as i64, delta)?;
    let expected = ExactRational::ratio(delta - 1, 12 * delta as u128);
    if value != expected {
        return Err(Error::invariant(format!(
            "s({}, {delta}) = {value}, expected {expected}",
            r.ratio % delta
        )));
    }
    let tilde = tilde_with(r.ratio as i64, f, &fact.squarefree_divisors())?;
    let tilde_expected = ExactRational::ratio(fact.totient(), 12 * f as u128);
    if tilde != tilde_expected {
        return Err(Error::invariant(format!(
            "s̃({}, {f}) = {tilde}, expected {tilde_expected}",
            r.ratio
        )));
    }
    Ok(value)
}
