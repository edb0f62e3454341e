//! Dirichlet characters modulo `f`, encoded as exponent vectors against the
//! CRT generators of `(ℤ/fℤ)*`.
//!
//! A character `χ` with exponents `(e_1, …, e_r)` sends the generator `g_i`
//! of order `o_i` to `exp(2πi e_i / o_i)`. Values are reported as an index
//! `k` modulo the group exponent `E`, meaning `χ(x) = exp(2πi k / E)`, so
//! parity and triviality tests stay exact; complex values are only produced
//! on request.

use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{gcd, mul_mod};
use crate::units::{kernel_subgroup, unit_group, Subgroup, UnitGroup};
use crate::{Error, Result};

const NOT_A_UNIT: u32 = u32::MAX;

/// Discrete-log coordinates of every residue modulo `f`.
#[derive(Debug)]
pub struct CharacterTable {
    group: UnitGroup,
    exponent: u64,
    /// `coords[x * r + i]` is the exponent of generator `i` in `x`.
    coords: Vec<u32>,
}

impl CharacterTable {
    pub fn new(f: u64) -> Result<Self> {
        if f < 3 {
            return Err(Error::invalid(format!("characters need f ≥ 3, got {f}")));
        }
        if f > 10_000_000 {
            return Err(Error::invalid(format!("character tables are limited to f ≤ 10^7, got {f}")));
        }
        let group = unit_group(f)?;
        let r = group.generators().len();
        let powers: Vec<Vec<u64>> = group
            .generators()
            .iter()
            .zip(group.orders())
            .map(|(&g, &o)| {
                let mut v = Vec::with_capacity(o as usize);
                let mut x = 1u64;
                for _ in 0..o {
                    v.push(x);
                    x = mul_mod(x, g, f);
                }
                v
            })
            .collect();
        let mut coords = vec![NOT_A_UNIT; f as usize * r];
        let mut exps = vec![0usize; r];
        for _ in 0..group.order() {
            let x = exps
                .iter()
                .zip(&powers)
                .fold(1u64, |acc, (&e, pw)| mul_mod(acc, pw[e], f));
            for (i, &e) in exps.iter().enumerate() {
                coords[x as usize * r + i] = e as u32;
            }
            for i in (0..r).rev() {
                exps[i] += 1;
                if exps[i] < powers[i].len() {
                    break;
                }
                exps[i] = 0;
            }
        }
        let exponent = group.exponent();
        Ok(CharacterTable { group, exponent, coords })
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    /// The group exponent `E`; character values are `E`-th roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Discrete-log coordinates of `x`, or `None` when `gcd(x, f) > 1`.
    pub fn coordinates(&self, x: u64) -> Option<&[u32]> {
        let f = self.modulus();
        let r = self.group.generators().len();
        let x = (x % f) as usize;
        if r == 0 {
            return (gcd(x as u64, f) == 1).then_some(&[][..]);
        }
        let slice = &self.coords[x * r..(x + 1) * r];
        (slice[0] != NOT_A_UNIT).then_some(slice)
    }
}

/// A Dirichlet character modulo `f`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    table: Arc<CharacterTable>,
    exponents: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    /// The character with the given exponent vector, each `e_i < o_i`.
    pub fn new(table: Arc<CharacterTable>, exponents: Vec<u64>) -> Result<Self> {
        let orders = table.group().orders();
        if exponents.len() != orders.len() || exponents.iter().zip(orders).any(|(e, o)| e >= o) {
            return Err(Error::invalid(format!(
                "exponent vector {exponents:?} does not fit generator orders {orders:?}"
            )));
        }
        Ok(DirichletCharacter { table, exponents })
    }

    pub fn modulus(&self) -> u64 {
        self.table.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn table(&self) -> &Arc<CharacterTable> {
        &self.table
    }

    /// `k` with `χ(x) = exp(2πi k / E)`, or `None` when `χ(x) = 0`.
    pub fn index(&self, x: u64) -> Option<u64> {
        let coords = self.table.coordinates(x)?;
        let e = self.table.exponent();
        let orders = self.table.group().orders();
        let mut k: u128 = 0;
        for ((&c, &ex), &o) in coords.iter().zip(&self.exponents).zip(orders) {
            k += c as u128 * ex as u128 * (e / o) as u128;
        }
        Some((k % e as u128) as u64)
    }

    pub fn value(&self, x: u64) -> Complex64 {
        match self.index(x) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k, self.table.exponent()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// `χ(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        let e = self.table.exponent();
        self.index(self.modulus() - 1) == Some(e / 2) && e % 2 == 0
    }

    /// Order of `χ` in the character group.
    pub fn order(&self) -> u64 {
        use num_integer::Integer;
        self.exponents
            .iter()
            .zip(self.table.group().orders())
            .fold(1u64, |acc, (&e, &o)| acc.lcm(&(o / gcd(e, o))))
    }

    pub fn is_trivial_on(&self, h: &Subgroup) -> bool {
        h.modulus() == self.modulus() && h.generators().iter().all(|&g| self.index(g) == Some(0))
    }

    /// Smallest `d | f` such that `χ` is trivial on `{x ≡ 1 (mod d)}`.
    pub fn conductor(&self) -> u64 {
        let f = self.modulus();
        for d in self.table.group().factorization().divisors() {
            let kernel = kernel_subgroup(f, d).expect("divisor of f");
            if self.is_trivial_on(&kernel) {
                return d;
            }
        }
        f
    }

    /// Root-of-unity index of the primitive character `χ*` at `q`, or `None`
    /// when `χ*(q) = 0`.
    pub fn primitive_index(&self, q: u64) -> Option<u64> {
        let d = self.conductor();
        self.primitive_index_with_conductor(q, d)
    }

    pub(crate) fn primitive_index_with_conductor(&self, q: u64, d: u64) -> Option<u64> {
        if gcd(q % d, d) != 1 && d > 1 {
            return None;
        }
        let f = self.modulus();
        // Any lift of q mod d that is a unit mod f gives the same value.
        let base = q % d;
        (0..f / d)
            .map(|k| base + k * d)
            .find(|&x| gcd(x, f) == 1)
            .and_then(|x| self.index(x))
    }

    /// `χ*(q)` for the primitive character inducing `χ`.
    pub fn primitive_value(&self, q: u64) -> Complex64 {
        match self.primitive_index(q) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k, self.table.exponent()),
        }
    }
}

pub(crate) fn root_of_unity(k: u64, e: u64) -> Complex64 {
    let k = k % e;
    // Exact values at the quarter turns keep real characters real.
    if 4 * k % e == 0 {
        return match 4 * k / e {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * k as f64 / e as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// All `φ(f)` characters modulo `f`, in lexicographic order of exponent vectors.
pub fn characters(f: u64) -> Result<Vec<DirichletCharacter>> {
    let table = Arc::new(CharacterTable::new(f)?);
    Ok(characters_of(&table))
}

pub(crate) fn characters_of(table: &Arc<CharacterTable>) -> Vec<DirichletCharacter> {
    let orders = table.group().orders().to_vec();
    let mut out = Vec::with_capacity(orders.iter().product::<u64>() as usize);
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter {
            table: Arc::clone(table),
            exponents: exps.clone(),
        });
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// `X_f⁻(H)`: the odd characters trivial on `H`; there are `φ(f) / 2|H|`.
pub fn odd_characters_trivial_on(h: &Subgroup) -> Result<Vec<DirichletCharacter>> {
    if h.contains_minus_one() {
        return Err(Error::MinusOneInSubgroup(h.modulus()));
    }
    let table = Arc::new(CharacterTable::new(h.modulus())?);
    Ok(characters_of(&table)
        .into_iter()
        .filter(|chi| chi.is_odd() && chi.is_trivial_on(h))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::totient;
    use crate::units::{cyclic_subgroups, subgroup_of_order};

    #[test]
    fn character_counts() {
        for (f, total) in [(7u64, 6usize), (91, 72), (9, 6)] {
            let chars = characters(f).unwrap();
            assert_eq!(chars.len(), total);
            assert_eq!(chars.iter().filter(|c| c.is_odd()).count(), total / 2);
        }
        assert!(characters(2).is_err());
    }

    #[test]
    fn coordinates_cover_units() {
        for f in [3u64, 4, 8, 12, 16, 91, 360, 1024] {
            let table = CharacterTable::new(f).unwrap();
            let units = (0..f).filter(|&x| table.coordinates(x).is_some()).count() as u64;
            assert_eq!(units, totient(f).unwrap(), "f = {f}");
            for x in 0..f {
                assert_eq!(table.coordinates(x).is_some(), gcd(x, f) == 1);
            }
        }
    }

    #[test]
    fn characters_are_multiplicative() {
        for f in [7u64, 9, 20, 24, 63, 91] {
            for chi in characters(f).unwrap() {
                for a in 0..f {
                    for b in 0..f {
                        let lhs = chi.value(a * b % f);
                        let rhs = chi.value(a) * chi.value(b);
                        assert!((lhs - rhs).norm() < 1e-12, "f={f} χ={:?}", chi.exponents());
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality() {
        for f in [7u64, 15, 16, 21] {
            let chars = characters(f).unwrap();
            for (i, a) in chars.iter().enumerate() {
                for (j, b) in chars.iter().enumerate() {
                    let s: Complex64 = (0..f).map(|x| a.value(x) * b.value(x).conj()).sum();
                    let expected = if i == j { totient(f).unwrap() as f64 } else { 0.0 };
                    assert!((s - expected).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn odd_characters_trivial_on_examples() {
        let h = subgroup_of_order(3, 7).unwrap();
        let x = odd_characters_trivial_on(&h).unwrap();
        assert_eq!(x.len(), 1);
        for a in 1..7 {
            let legendre = if [1, 2, 4].contains(&a) { 1.0 } else { -1.0 };
            assert!((x[0].value(a) - legendre).norm() < 1e-12);
        }
        let h = subgroup_of_order(3, 13).unwrap();
        let x = odd_characters_trivial_on(&h).unwrap();
        assert_eq!(x.len(), 2);
        assert!(x.iter().all(|c| c.order() == 4));
        let h = Subgroup::cyclic(1, 9).unwrap();
        assert_eq!(odd_characters_trivial_on(&h).unwrap().len(), 3);
        let h = Subgroup::cyclic(6, 7).unwrap();
        assert!(matches!(odd_characters_trivial_on(&h), Err(Error::MinusOneInSubgroup(7))));
    }

    #[test]
    fn odd_character_count_formula() {
        for f in 3..=150u64 {
            let phi = totient(f).unwrap();
            for h in cyclic_subgroups(f).unwrap() {
                if h.contains_minus_one() {
                    continue;
                }
                let count = odd_characters_trivial_on(&h).unwrap().len() as u64;
                assert_eq!(count, phi / (2 * h.order()), "f = {f}, H = {:?}", h.elements());
            }
        }
    }

    #[test]
    fn conductor_examples() {
        let h = kernel_subgroup(9, 3).unwrap();
        let odd = odd_characters_trivial_on(&h).unwrap();
        assert_eq!(odd.len(), 1);
        assert_eq!(odd[0].conductor(), 3);
        for chi in characters(13).unwrap() {
            assert_eq!(chi.conductor(), if chi.is_trivial() { 1 } else { 13 });
        }
        let h = Subgroup::generated_by(&[9, 81], 91).unwrap();
        let x = odd_characters_trivial_on(&h).unwrap();
        assert_eq!(x.len(), 12);
        assert_eq!(x.iter().filter(|c| c.conductor() < 91).count(), 3);
    }

    #[test]
    fn primitive_values_agree_with_lower_modulus() {
        // A character mod 45 of conductor 9 agrees with a character mod 9.
        let chars45 = characters(45).unwrap();
        let chars9 = characters(9).unwrap();
        for chi in chars45.iter().filter(|c| c.conductor() == 9) {
            let matched = chars9.iter().any(|psi| {
                (1..9u64).all(|q| (chi.primitive_value(q) - psi.value(q)).norm() < 1e-12)
            });
            assert!(matched, "{:?}", chi.exponents());
            assert_eq!(chi.primitive_value(3), Complex64::new(0.0, 0.0));
            assert!(chi.primitive_value(5).norm() > 0.5);
        }
    }
}
