//! Sieve of Eratosthenes, plain and segmented, with an arithmetic
//! progression filter.

use crate::arith::gcd;
use crate::{Error, Result};

/// Width of one sieve segment, in integers.
const SEGMENT: u64 = 1 << 18;

/// All primes `≤ limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Ascending stream of the primes `p` with `lower ≤ p ≤ upper` and
/// `p ≡ residue (mod modulus)`.
///
/// Memory is one segment of [`SEGMENT`] bytes plus the base primes up to
/// `√upper`, so windows near `10¹³` are cheap.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    lower: u64,
    upper: u64,
    modulus: u64,
    residue: u64,
    base: Vec<u64>,
    next_segment: u64,
    done: bool,
    buffer: Vec<u64>,
    cursor: usize,
    marks: Vec<bool>,
}

impl PrimeStream {
    pub fn lower(&self) -> u64 {
        self.lower
    }

    /// Inclusive.
    pub fn upper(&self) -> u64 {
        self.upper
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    fn fill(&mut self) {
        self.buffer.clear();
        self.cursor = 0;
        while self.buffer.is_empty() && !self.done {
            let lo = self.next_segment;
            let hi = lo.saturating_add(SEGMENT - 1).min(self.upper);
            if hi == self.upper {
                self.done = true;
            } else {
                self.next_segment = hi + 1;
            }
            self.sieve_segment(lo, hi);
        }
    }

    fn sieve_segment(&mut self, lo: u64, hi: u64) {
        let len = (hi - lo + 1) as usize;
        self.marks.clear();
        self.marks.resize(len, true);
        for &p in &self.base {
            if p.saturating_mul(p) > hi {
                break;
            }
            let first = (p * p).max(lo.div_ceil(p) * p);
            let mut m = first;
            while m <= hi {
                self.marks[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &is_prime) in self.marks.iter().enumerate() {
            let v = lo + i as u64;
            if is_prime && v >= 2 && v % self.modulus == self.residue {
                self.buffer.push(v);
            }
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.cursor >= self.buffer.len() {
            if self.done {
                return None;
            }
            self.fill();
        }
        let v = self.buffer.get(self.cursor).copied();
        self.cursor += 1;
        v
    }
}

/// Primes in `[lower, lower + span]` congruent to `residue` mod `modulus`.
///
/// Rejects `gcd(residue, modulus) > 1` for `modulus > 1`: such progressions
/// contain at most one prime, which is more often a caller mistake than a
/// request.
pub fn primes_in_progression(lower: u64, span: u64, modulus: u64, residue: u64) -> Result<PrimeStream> {
    if modulus == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if residue >= modulus {
        return Err(Error::invalid(format!("residue {residue} not reduced modulo {modulus}")));
    }
    if modulus > 1 && gcd(residue, modulus) > 1 {
        return Err(Error::invalid(format!(
            "gcd({residue}, {modulus}) > 1: progression contains at most one prime"
        )));
    }
    let upper = lower
        .checked_add(span)
        .ok_or_else(|| Error::invalid("lower + span overflows u64"))?;
    let base = primes_up_to(isqrt(upper));
    Ok(PrimeStream {
        lower,
        upper,
        modulus,
        residue,
        base,
        next_segment: lower,
        done: false,
        buffer: Vec::new(),
        cursor: 0,
        marks: Vec::new(),
    })
}
