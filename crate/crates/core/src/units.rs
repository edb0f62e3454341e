//! The unit group `(ℤ/fℤ)*`: its CRT generators, subgroups given by
//! explicit element lists, element orders, reduction kernels and traces.

use serde::{Serialize, Serializer};

use crate::arith::{factorize, gcd, inverse_mod, is_prime, mul_mod, order_dividing, pow_mod, Factorization};
use crate::{Error, Result};

/// Structure of `(ℤ/fℤ)*` as a product of cyclic factors.
///
/// Generators are lifted by the CRT so that each is `1` modulo every prime
/// power other than its own component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    modulus: u64,
    factorization: Factorization,
    generators: Vec<u64>,
    orders: Vec<u64>,
}

impl UnitGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Order of each generator; their product is `φ(f)`.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent of the group (lcm of the component orders).
    pub fn exponent(&self) -> u64 {
        self.factorization.carmichael()
    }
}

/// Smallest primitive root modulo `p^k` for an odd prime `p`.
fn primitive_root_prime_power(p: u64, k: u32) -> Result<u64> {
    let g = crate::arith::smallest_primitive_root(p)?;
    if k == 1 {
        return Ok(g);
    }
    // g stays primitive mod p^k for every k ≥ 2 iff g^(p-1) ≢ 1 mod p².
    let p2 = p * p;
    let pk = p.pow(k);
    (g..pk)
        .find(|&x| is_primitive_mod_p(x % p, p) && pow_mod(x, p - 1, p2) != 1)
        .ok_or_else(|| Error::invariant(format!("no primitive root modulo {p}^{k}")))
}

fn is_primitive_mod_p(x: u64, p: u64) -> bool {
    if x == 0 {
        return false;
    }
    factorize(p - 1)
        .map(|f| f.primes().all(|q| pow_mod(x, (p - 1) / q, p) != 1))
        .unwrap_or(false)
}

/// Lifts `x mod m_i` to a residue modulo `f` that is `1` modulo `f / m_i`.
fn crt_lift(x: u64, component: u64, f: u64) -> u64 {
    let rest = f / component;
    if rest == 1 {
        return x % f;
    }
    // Solve y ≡ x (mod component), y ≡ 1 (mod rest).
    let inv = inverse_mod(rest % component, component).expect("coprime CRT components");
    let t = mul_mod((x + component - 1) % component, inv, component);
    (1 + (t as u128 * rest as u128) as u64) % f
}

/// CRT structure of `(ℤ/fℤ)*`.
pub fn unit_group(f: u64) -> Result<UnitGroup> {
    if f < 2 {
        return Err(Error::invalid(format!("unit group needs f ≥ 2, got {f}")));
    }
    let factorization = factorize(f)?;
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    for &(p, e) in factorization.pairs() {
        let pk = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => {
                    generators.push(crt_lift(3, pk, f));
                    orders.push(2);
                }
                _ => {
                    generators.push(crt_lift(pk - 1, pk, f));
                    orders.push(2);
                    generators.push(crt_lift(5, pk, f));
                    orders.push(1 << (e - 2));
                }
            }
        } else {
            let g = primitive_root_prime_power(p, e)?;
            generators.push(crt_lift(g, pk, f));
            orders.push((p - 1) * p.pow(e - 1));
        }
    }
    Ok(UnitGroup {
        modulus: f,
        factorization,
        generators,
        orders,
    })
}

/// Multiplicative orders modulo a fixed `f`, reusing the factorisation of `λ(f)`.
#[derive(Clone, Debug)]
pub struct OrderOracle {
    modulus: u64,
    exponent: u64,
    exponent_factors: Factorization,
}

impl OrderOracle {
    pub fn new(f: u64) -> Result<Self> {
        if f == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        let exponent = factorize(f)?.carmichael();
        Ok(OrderOracle {
            modulus: f,
            exponent,
            exponent_factors: factorize(exponent)?,
        })
    }

    /// Order of a unit `x`; the caller guarantees `gcd(x, f) = 1`.
    pub fn order_of_unit(&self, x: u64) -> u64 {
        if self.modulus == 1 {
            return 1;
        }
        order_dividing(x % self.modulus, self.modulus, self.exponent, &self.exponent_factors)
    }
}

/// Multiplicative order of `x` modulo `f`.
pub fn element_order(x: i64, f: u64) -> Result<u64> {
    if f == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    let x = (x as i128).rem_euclid(f as i128) as u64;
    let g = gcd(x, f);
    if g != 1 && f != 1 {
        return Err(Error::NotCoprime {
            c: x.to_string(),
            d: f.to_string(),
            gcd: g.to_string(),
        });
    }
    Ok(OrderOracle::new(f)?.order_of_unit(x))
}

/// A subgroup of `(ℤ/fℤ)*` stored as its sorted element list.
///
/// Equality compares the modulus and the elements, not the generating set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    modulus: u64,
    elements: Vec<u64>,
    generators: Vec<u64>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.elements.hash(state);
    }
}

impl Subgroup {
    /// The subgroup generated by `gens`.
    pub fn generated_by(gens: &[u64], f: u64) -> Result<Self> {
        if f < 2 {
            return Err(Error::invalid(format!("subgroups need f ≥ 2, got {f}")));
        }
        let mut elements = vec![1u64];
        let mut member = vec![false; f as usize];
        member[1] = true;
        let mut generators = Vec::new();
        for &g in gens {
            let g = g % f;
            if gcd(g, f) != 1 {
                return Err(Error::NotCoprime {
                    c: g.to_string(),
                    d: f.to_string(),
                    gcd: gcd(g, f).to_string(),
                });
            }
            if member[g as usize] {
                continue;
            }
            generators.push(g);
            // Multiply the current group by successive powers of g until closed.
            let base = elements.clone();
            let mut power = g;
            while !member[power as usize] {
                for &h in &base {
                    let v = mul_mod(h, power, f);
                    if !member[v as usize] {
                        member[v as usize] = true;
                        elements.push(v);
                    }
                }
                power = mul_mod(power, g, f);
            }
        }
        elements.sort_unstable();
        Ok(Subgroup {
            modulus: f,
            elements,
            generators,
        })
    }

    /// The cyclic subgroup `⟨h⟩`.
    pub fn cyclic(h: u64, f: u64) -> Result<Self> {
        Self::generated_by(&[h], f)
    }

    /// Builds a subgroup from an element list, checking closure.
    pub fn from_elements(f: u64, elements: &[u64]) -> Result<Self> {
        let mut sorted: Vec<u64> = elements.iter().map(|&x| x % f.max(1)).collect();
        sorted.sort_unstable();
        sorted.dedup();
        let group = Self::generated_by(&sorted, f)?;
        if group.elements != sorted {
            return Err(Error::invalid(format!("{elements:?} is not a subgroup of (ℤ/{f}ℤ)*")));
        }
        Ok(group)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// A generating set: each generator lies outside the span of the previous ones.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.modulus)).is_ok()
    }

    pub fn contains_minus_one(&self) -> bool {
        self.contains(self.modulus - 1)
    }

    pub fn is_cyclic(&self) -> bool {
        let oracle = OrderOracle::new(self.modulus).expect("modulus ≥ 2");
        self.elements.iter().any(|&x| oracle.order_of_unit(x) == self.order())
    }

    /// Closure under multiplication and membership of `1`.
    pub fn is_closed(&self) -> bool {
        self.contains(1)
            && self
                .elements
                .iter()
                .all(|&a| self.generators.iter().all(|&g| self.contains(mul_mod(a, g, self.modulus))))
            && self.elements.iter().all(|&a| gcd(a, self.modulus) == 1)
    }
}

impl Serialize for Subgroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

/// The unique subgroup of order `n` in `(ℤ/pℤ)*`, generated by `g^((p-1)/n)`
/// for the smallest primitive root `g`.
pub fn subgroup_of_order(n: u64, p: u64) -> Result<Subgroup> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if n == 0 || (p - 1) % n != 0 {
        return Err(Error::invalid(format!("{n} does not divide {p} - 1")));
    }
    let g = crate::arith::smallest_primitive_root(p)?;
    let h = pow_mod(g, (p - 1) / n, p);
    let mut elements = Vec::with_capacity(n as usize);
    let mut x = 1u64;
    for _ in 0..n {
        elements.push(x);
        x = mul_mod(x, h, p);
    }
    elements.sort_unstable();
    Ok(Subgroup {
        modulus: p,
        elements,
        generators: if n == 1 { Vec::new() } else { vec![h] },
    })
}

/// The kernel `{x ≡ 1 (mod f′)}` of reduction `(ℤ/fℤ)* → (ℤ/f′ℤ)*`.
pub fn kernel_subgroup(f: u64, f_prime: u64) -> Result<Subgroup> {
    if f < 2 {
        return Err(Error::invalid(format!("kernel needs f ≥ 2, got {f}")));
    }
    if f_prime == 0 || f % f_prime != 0 {
        return Err(Error::invalid(format!("{f_prime} does not divide {f}")));
    }
    let elements: Vec<u64> = (0..f / f_prime)
        .map(|k| (1 + k * f_prime) % f)
        .filter(|&x| gcd(x, f) == 1)
        .collect();
    Subgroup::generated_by(&elements, f)
}

/// All units of exact order `q` modulo `f`, ascending.
pub fn elements_of_order(q: u64, f: u64) -> Result<Vec<u64>> {
    if f < 2 {
        return Err(Error::invalid(format!("modulus must be ≥ 2, got {f}")));
    }
    let oracle = OrderOracle::new(f)?;
    if q == 0 || oracle.exponent % q != 0 {
        return Ok(Vec::new());
    }
    Ok((1..f)
        .filter(|&x| gcd(x, f) == 1 && pow_mod(x, q, f) == 1 && oracle.order_of_unit(x) == q)
        .collect())
}

/// `T(H, f) = Σ_{h ∈ H} h`, reduced and unreduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceValue {
    /// `T mod f`.
    pub residue: u64,
    /// `gcd(f, T)`, with `gcd(f, 0) = f`.
    pub gcd: u64,
    /// The integer sum of the representatives in `[1, f-1]`.
    pub raw_sum: u128,
}

pub fn trace(h: &Subgroup) -> TraceValue {
    let f = h.modulus;
    let raw_sum: u128 = h.elements.iter().map(|&x| x as u128).sum();
    let residue = (raw_sum % f as u128) as u64;
    let g = if residue == 0 { f } else { gcd(f, residue) };
    TraceValue { residue, gcd: g, raw_sum }
}

/// Every cyclic subgroup of `(ℤ/fℤ)*`, sorted by order then elements.
pub fn cyclic_subgroups(f: u64) -> Result<Vec<Subgroup>> {
    if f < 2 {
        return Err(Error::invalid(format!("modulus must be ≥ 2, got {f}")));
    }
    let oracle = OrderOracle::new(f)?;
    let mut seen = vec![false; f as usize];
    let mut out = Vec::new();
    for x in 1..f {
        if seen[x as usize] || gcd(x, f) != 1 {
            continue;
        }
        let n = oracle.order_of_unit(x);
        let mut powers = Vec::with_capacity(n as usize);
        let mut y = 1u64;
        for k in 0..n {
            if gcd(k, n) == 1 {
                seen[y as usize] = true;
            }
            powers.push(y);
            y = mul_mod(y, x, f);
        }
        powers.sort_unstable();
        out.push(Subgroup {
            modulus: f,
            elements: powers,
            generators: if n == 1 { Vec::new() } else { vec![x] },
        });
    }
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(out)
}
