//! Dedekind sums `s(c, d)` and the restricted sums `s̃(c, f)`.
//!
//! Two independent evaluation routes are provided:
//!
//! * [`dedekind_sum_naive`] sums the sawtooth products `((a/d))((ac/d))`
//!   directly in `O(d)` integer operations. It is the reference oracle.
//! * [`dedekind_sum`] runs the reciprocity law
//!   `s(c,d) + s(d,c) = (c² + d² - 3cd + 1) / 12cd` down the Euclidean
//!   remainder sequence and finishes with `s(1,d) = (d-1)(d-2)/12d`, so it
//!   costs `O(log d)` steps. Intermediate fractions are kept in `i128` while
//!   they fit and fall back to `BigInt` otherwise; the two paths agree
//!   bit for bit.
//!
//! Arguments are normalised by periodicity, so negative `c` is accepted and
//! `s(-c, d) = -s(c, d)` holds by construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::arith::{factorize, Factorization};
use crate::{Error, ExactRational, Result};

/// Largest modulus accepted by the `O(d)` oracle.
pub const NAIVE_MAX_MODULUS: u64 = 1 << 32;

fn reduce_args(c: i64, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::invalid("Dedekind sum modulus must be ≥ 1"));
    }
    let c_red = (c as i128).rem_euclid(d as i128) as u64;
    let g = c_red.gcd(&d);
    if g != 1 {
        return Err(Error::NotCoprime {
            c: c.to_string(),
            d: d.to_string(),
            gcd: g.to_string(),
        });
    }
    Ok(c_red)
}

/// `s(c, d)` straight from the sawtooth definition.
///
/// `s(c, 1) = 0` for every `c`.
pub fn dedekind_sum_naive(c: i64, d: u64) -> Result<ExactRational> {
    let c = reduce_args(c, d)?;
    if d > NAIVE_MAX_MODULUS {
        return Err(Error::invalid(format!("naive evaluation limited to d ≤ {NAIVE_MAX_MODULUS}")));
    }
    if d == 1 {
        return Ok(ExactRational::zero());
    }
    // ((a/d)) = (2a - d) / 2d for 0 < a < d, and ac/d is never an integer.
    let dd = d as i128;
    let mut acc: i128 = 0;
    let mut r: u64 = 0;
    for a in 1..d {
        r += c;
        if r >= d {
            r -= d;
        }
        acc += (2 * a as i128 - dd) * (2 * r as i128 - dd);
    }
    Ok(ExactRational::ratio(acc, 4 * dd * dd))
}

/// `s(1, d) = (d-1)(d-2) / 12d`.
pub fn s_one(d: u64) -> Result<ExactRational> {
    if d == 0 {
        return Err(Error::invalid("s(1, d) needs d ≥ 1"));
    }
    let d = BigInt::from(d);
    Ok(ExactRational::ratio((&d - 1u32) * (&d - 2u32), d * 12u32))
}

type Frac = (i128, i128);

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

fn reduce(num: i128, den: i128) -> Frac {
    let g = gcd_i128(num, den);
    if g > 1 {
        (num / g, den / g)
    } else {
        (num, den)
    }
}

fn add_frac(a: Frac, b: Frac) -> Option<Frac> {
    let g = gcd_i128(a.1, b.1);
    let (la, lb) = (a.1 / g, b.1 / g);
    let num = a.0.checked_mul(lb)?.checked_add(b.0.checked_mul(la)?)?;
    let den = la.checked_mul(b.1)?;
    Some(reduce(num, den))
}

/// Reciprocity evaluation in `i128`; `None` when an intermediate overflows.
///
/// Requires `0 < c < d`, `gcd(c, d) = 1` or `d = 1`.
pub(crate) fn dedekind_i128(c: u64, d: u64) -> Option<Frac> {
    if d == 1 {
        return Some((0, 1));
    }
    let (mut c, mut d) = (c as i128, d as i128);
    let mut acc: Frac = (0, 1);
    let mut negate = false;
    while c != 1 {
        let num = c
            .checked_mul(c)?
            .checked_add(d.checked_mul(d)?)?
            .checked_sub(c.checked_mul(d)?.checked_mul(3)?)?
            .checked_add(1)?;
        let den = c.checked_mul(d)?.checked_mul(12)?;
        let term = reduce(num, den);
        acc = add_frac(acc, if negate { (-term.0, term.1) } else { term })?;
        negate = !negate;
        (c, d) = (d % c, c);
    }
    let base = reduce((d - 1).checked_mul(d - 2)?, d.checked_mul(12)?);
    add_frac(acc, if negate { (-base.0, base.1) } else { base })
}

fn dedekind_bigint(c: BigInt, d: BigInt) -> ExactRational {
    let mut acc = ExactRational::zero();
    let (mut c, mut d) = (c, d);
    let mut negate = false;
    if d.is_one() {
        return acc;
    }
    while !c.is_one() {
        let num = &c * &c + &d * &d - &c * &d * 3u32 + 1u32;
        let term = ExactRational::ratio(num, &c * &d * 12u32);
        if negate {
            acc -= &term;
        } else {
            acc += &term;
        }
        negate = !negate;
        let r = &d % &c;
        d = c;
        c = r;
    }
    let base = ExactRational::ratio((&d - 1u32) * (&d - 2u32), &d * 12u32);
    if negate {
        acc - base
    } else {
        acc + base
    }
}

/// `s(c, d)` by the reciprocity law in `O(log d)` steps.
pub fn dedekind_sum(c: i64, d: u64) -> Result<ExactRational> {
    let c = reduce_args(c, d)?;
    if d == 1 {
        return Ok(ExactRational::zero());
    }
    // 12cd < 2^126 keeps every intermediate product comfortably inside i128
    // for typical inputs; checked arithmetic covers the rest.
    let fits = (c as u128)
        .checked_mul(d as u128)
        .and_then(|cd| cd.checked_mul(12))
        .is_some_and(|v| v < 1u128 << 126);
    if fits {
        if let Some((num, den)) = dedekind_i128(c, d) {
            return Ok(ExactRational::ratio(num, den));
        }
    }
    Ok(dedekind_bigint(BigInt::from(c), BigInt::from(d)))
}

/// `s(c, d)` for arbitrary precision arguments, `d ≥ 1`, `gcd(c, d) = 1`.
pub fn dedekind_sum_big(c: &BigInt, d: &BigInt) -> Result<ExactRational> {
    if !d.is_positive() {
        return Err(Error::invalid("Dedekind sum modulus must be ≥ 1"));
    }
    let c_red = c.mod_floor(d);
    let g = c_red.gcd(d);
    if !g.is_one() {
        return Err(Error::NotCoprime {
            c: c.to_string(),
            d: d.to_string(),
            gcd: g.to_string(),
        });
    }
    if d.is_one() {
        return Ok(ExactRational::zero());
    }
    Ok(dedekind_bigint(c_red, d.clone()))
}

/// `6d · s(c, d)`, always an integer, for `0 < c < d` coprime.
///
/// This is the hot path of the prime survey. `None` signals that the
/// `i128` route overflowed; callers fall back to [`dedekind_sum`].
pub(crate) fn six_d_times(c: u64, d: u64) -> Option<i128> {
    let (num, den) = dedekind_i128(c, d)?;
    let scale = 6 * d as i128;
    if scale % den != 0 {
        return None;
    }
    num.checked_mul(scale / den)
}

pub(crate) fn tilde_with(c: i64, f: u64, sqfree: &[(u64, i32)]) -> Result<ExactRational> {
    let mut acc = ExactRational::zero();
    for &(delta, mu) in sqfree {
        let s = dedekind_sum(c, f / delta)?;
        let weighted = ExactRational::ratio(BigInt::from(mu), BigInt::from(delta)) * s;
        acc += weighted;
    }
    Ok(acc)
}

/// `s̃(c, f) = Σ_{δ | f} μ(δ)/δ · s(c, f/δ)`, the Dedekind-type sum restricted
/// to indices coprime to `f`.
pub fn dedekind_sum_tilde(c: i64, f: u64) -> Result<ExactRational> {
    if f < 2 {
        return Err(Error::invalid("s̃(c, f) needs f ≥ 2"));
    }
    reduce_args(c, f)?;
    let fact = factorize(f)?;
    tilde_with(c, f, &fact.squarefree_divisors())
}

pub(crate) fn tilde_s_one_from(f: u64, fact: &Factorization) -> ExactRational {
    let mut euler = ExactRational::one();
    for p in fact.primes() {
        euler = euler * ExactRational::ratio(p + 1, p);
    }
    let inner = euler - ExactRational::ratio(3u32, f);
    ExactRational::ratio(fact.totient(), 12u32) * inner
}

/// `s̃(1, f) = φ(f)/12 · (∏_{p | f} (1 + 1/p) - 3/f)`.
pub fn tilde_s_one(f: u64) -> Result<ExactRational> {
    if f < 2 {
        return Err(Error::invalid("s̃(1, f) needs f ≥ 2"));
    }
    Ok(tilde_s_one_from(f, &factorize(f)?))
}

/// The common value `f'²/12f - 1/4 + 1/6f` of `s(1 + k f', f)` over all `k`
/// coprime to `f`, valid when `f' | f | f'²`.
pub fn s_near_one_closed(f: u64, f_prime: u64) -> Result<ExactRational> {
    if f == 0 || f_prime == 0 {
        return Err(Error::invalid("f and f' must be positive"));
    }
    let fp2 = (f_prime as u128) * (f_prime as u128);
    if f % f_prime != 0 || fp2 % f as u128 != 0 {
        return Err(Error::invalid(format!("need f' | f | f'^2, got f = {f}, f' = {f_prime}")));
    }
    let f_big = BigInt::from(f);
    Ok(ExactRational::ratio(BigInt::from(fp2), &f_big * 12u32) - ExactRational::ratio(1u32, 4u32)
        + ExactRational::ratio(1u32, f_big * 6u32))
}
