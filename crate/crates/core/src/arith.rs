//! Integer arithmetic: modular exponentiation, primality, factorisation and
//! the multiplicative functions built on it.

use std::sync::OnceLock;

use num_integer::Integer;
use serde::Serialize;

use crate::sieve::primes_up_to;
use crate::{Error, Result};

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin; the witness set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A complete factorisation `∏ p^e`, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    /// The factored integer.
    pub fn value(&self) -> u128 {
        self.0.iter().map(|&(p, e)| (p as u128).pow(e)).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.0 {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Squarefree divisors paired with their Möbius value.
    pub fn squarefree_divisors(&self) -> Vec<(u64, i32)> {
        let mut out = vec![(1u64, 1i32)];
        for p in self.primes() {
            let len = out.len();
            for i in 0..len {
                let (d, mu) = out[i];
                out.push((d * p, -mu));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn totient(&self) -> u64 {
        self.0
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn mobius(&self) -> i32 {
        if self.is_squarefree() {
            if self.0.len() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    /// Carmichael's λ: the exponent of `(ℤ/nℤ)*`.
    pub fn carmichael(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, &(p, e)| {
            let part = if p == 2 && e >= 3 {
                1u64 << (e - 2)
            } else {
                (p - 1) * p.pow(e - 1)
            };
            acc.lcm(&part)
        })
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_LIMIT))
}

/// Brent's variant of Pollard's rho. `n` must be an odd composite.
fn pollard_rho(n: u64) -> u64 {
    // Deterministic increments so that runs are reproducible.
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut g = 1u64;
        let mut r = 1u64;
        let mut q = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho increments exhausted")
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Factorises `n ≥ 1` by trial division up to 10⁶ followed by Pollard's rho.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("cannot factorize 0"));
    }
    let mut rest = n;
    let mut primes: Vec<u64> = Vec::new();
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    if rest > 1 {
        split_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match pairs.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => pairs.push((p, 1)),
        }
    }
    Ok(Factorization(pairs))
}

pub fn mobius(n: u64) -> Result<i32> {
    Ok(factorize(n)?.mobius())
}

pub fn totient(n: u64) -> Result<u64> {
    Ok(factorize(n)?.totient())
}

pub fn divisors(n: u64) -> Result<Vec<u64>> {
    Ok(factorize(n)?.divisors())
}

/// Multiplicative order of `x` modulo `m`, given the factorisation of a
/// multiple of that order (λ(m) or m-1 for prime m).
pub(crate) fn order_dividing(x: u64, m: u64, exponent: u64, exponent_primes: &Factorization) -> u64 {
    let mut ord = exponent;
    for (p, _) in exponent_primes.pairs() {
        while ord % p == 0 && pow_mod(x, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Smallest primitive root modulo a prime `p`.
pub fn smallest_primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(1);
    }
    let phi = factorize(p - 1)?;
    (2..p)
        .find(|&g| phi.primes().all(|q| pow_mod(g, (p - 1) / q, p) != 1))
        .ok_or_else(|| Error::invariant(format!("no primitive root found modulo {p}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(91).unwrap().pairs(), &[(7, 1), (13, 1)]);
        assert!(factorize(1).unwrap().pairs().is_empty());
        assert_eq!(factorize(8281).unwrap().pairs(), &[(7, 2), (13, 2)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large() {
        // Two primes above the trial division limit.
        let (p, q) = (1_000_003u64, 998_244_353u64);
        assert_eq!(factorize(p * q).unwrap().pairs(), &[(p, 1), (q, 1)]);
        let n = 999_999_999_999_999_989u64; // prime
        assert!(is_prime(n));
        assert_eq!(factorize(n).unwrap().pairs(), &[(n, 1)]);
        let m = (1u64 << 61) - 2;
        assert_eq!(factorize(m).unwrap().value(), m as u128);
    }

    #[test]
    fn multiplicative_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(91).unwrap(), 1);
        assert_eq!(mobius(7).unwrap(), -1);
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(9).unwrap(), 6);
        assert_eq!(totient(91).unwrap(), 72);
        assert!(mobius(0).is_err());
        assert!(totient(0).is_err());
    }

    #[test]
    fn divisor_sums() {
        for n in 1..=10_000u64 {
            let f = factorize(n).unwrap();
            let divs = f.divisors();
            let mu_sum: i32 = divs.iter().map(|&d| mobius(d).unwrap()).sum();
            assert_eq!(mu_sum, i32::from(n == 1), "n = {n}");
            let phi_sum: u64 = divs.iter().map(|&d| totient(d).unwrap()).sum();
            assert_eq!(phi_sum, n, "n = {n}");
        }
    }

    #[test]
    fn factorization_round_trip_sampled() {
        for n in (1..=1_000_000u64).step_by(997) {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n as u128);
            assert!(f.primes().all(is_prime));
            assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn primality_against_sieve() {
        let primes = primes_up_to(100_000);
        let mut it = primes.iter().peekable();
        for n in 0..=100_000u64 {
            let expected = it.peek() == Some(&&n);
            if expected {
                it.next();
            }
            assert_eq!(is_prime(n), expected, "n = {n}");
        }
        // Strong pseudoprimes to several small bases.
        for n in [3_215_031_751u64, 3_825_123_056_546_413_051] {
            assert_eq!(is_prime(n), factorize(n).unwrap().pairs() == [(n, 1)]);
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(smallest_primitive_root(7).unwrap(), 3);
        assert_eq!(smallest_primitive_root(13).unwrap(), 2);
        assert_eq!(smallest_primitive_root(23).unwrap(), 5);
        assert!(smallest_primitive_root(9).is_err());
    }

    #[test]
    fn inverse() {
        assert_eq!(inverse_mod(5, 91), Some(73));
        assert_eq!(inverse_mod(7, 91), None);
        assert_eq!(inverse_mod(3, 1), Some(0));
    }

    #[test]
    fn carmichael_values() {
        assert_eq!(factorize(8).unwrap().carmichael(), 2);
        assert_eq!(factorize(91).unwrap().carmichael(), 12);
        assert_eq!(factorize(27).unwrap().carmichael(), 18);
    }
}
