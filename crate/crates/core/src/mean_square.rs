//! Subgroup sums of Dedekind sums and the mean square values
//! `M(f, H) = (2π²/f) · S̃(H, f)` of `|L(1, χ)|²` over the odd characters
//! trivial on `H`.
//!
//! Exact quantities are carried as [`ExactRational`]s, and mean squares as
//! [`PiSquared`] coefficients. The floating point routines
//! ([`l_one_numeric`], [`mean_square_numeric`], [`euler_correction_pi`]) exist
//! to cross-check the exact side.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{factorize, is_prime, Factorization};
use crate::characters::{odd_characters_trivial_on, root_of_unity, DirichletCharacter};
use crate::dedekind::{dedekind_sum, tilde_s_one_from, tilde_with};
use crate::rational::pi_squared_approx;
use crate::units::Subgroup;
use crate::{Error, ExactRational, Result};

/// The real number `coef · π²`, kept exact through its rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiSquared {
    coef: ExactRational,
}

impl PiSquared {
    pub fn new(coef: ExactRational) -> Self {
        PiSquared { coef }
    }

    pub fn coef(&self) -> &ExactRational {
        &self.coef
    }

    pub fn to_f64(&self) -> f64 {
        self.coef.to_f64() * PI * PI
    }

    /// Decimal rendering with `digits` significant digits, using π² to 64 places.
    pub fn approx_decimal(&self, digits: usize) -> String {
        (&self.coef * &pi_squared_approx()).to_significant(digits)
    }
}

impl std::fmt::Display for PiSquared {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})·π²", self.coef)
    }
}

impl Serialize for PiSquared {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PiSquared", 3)?;
        st.serialize_field("coef_num", &self.coef.numer().to_string())?;
        st.serialize_field("coef_den", &self.coef.denom().to_string())?;
        st.serialize_field("approx_decimal", &self.approx_decimal(30))?;
        st.end()
    }
}

/// `S(H, f) = Σ_{h ∈ H} s(h, f)`.
pub fn subgroup_sum_s(h: &Subgroup) -> Result<ExactRational> {
    let f = h.modulus();
    let mut acc = ExactRational::zero();
    for &x in h.elements() {
        acc += dedekind_sum(x as i64, f)?;
    }
    Ok(acc)
}

/// `S̃(H, f) = Σ_{h ∈ H} s̃(h, f)`.
pub fn subgroup_sum_tilde(h: &Subgroup) -> Result<ExactRational> {
    let f = h.modulus();
    let sq = factorize(f)?.squarefree_divisors();
    let mut acc = ExactRational::zero();
    for &x in h.elements() {
        acc += tilde_with(x as i64, f, &sq)?;
    }
    Ok(acc)
}

/// `M(f, H)` for `f = H.modulus()`, as an exact multiple of `π²`.
pub fn mean_square_exact(h: &Subgroup) -> Result<PiSquared> {
    let f = h.modulus();
    if f < 3 {
        return Err(Error::invalid(format!("mean squares need f ≥ 3, got {f}")));
    }
    if h.contains_minus_one() {
        return Err(Error::MinusOneInSubgroup(f));
    }
    let tilde = subgroup_sum_tilde(h)?;
    Ok(PiSquared::new(ExactRational::ratio(2u32, f) * tilde))
}

/// `N(H, p) = 12 S(H, p) - p`, an odd integer whenever `|H| > 1`.
pub fn n_value(p: u64, h: &Subgroup) -> Result<ExactRational> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if h.modulus() != p {
        return Err(Error::invalid(format!("subgroup has modulus {}, expected {p}", h.modulus())));
    }
    let n = ExactRational::from_integer(12) * subgroup_sum_s(h)? - ExactRational::from_integer(p);
    if h.order() > 1 {
        let int = n
            .to_integer()
            .ok_or_else(|| Error::invariant(format!("N(H, {p}) = {n} is not an integer")))?;
        if num_integer::Integer::is_even(&int) {
            return Err(Error::invariant(format!("N(H, {p}) = {n} is even")));
        }
    }
    Ok(n)
}

/// The exact data attached to a subgroup sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupSumReport {
    pub modulus: u64,
    pub order: u64,
    #[serde(rename = "S")]
    pub s: ExactRational,
    pub tilde_s: ExactRational,
    /// `2S` when it is an integer.
    #[serde(serialize_with = "ser_opt_bigint")]
    pub two_s_integer: Option<BigInt>,
    /// `12S - f` when `f` is prime.
    #[serde(rename = "N")]
    pub n: Option<ExactRational>,
}

fn ser_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_some(&n.to_string()),
        None => s.serialize_none(),
    }
}

pub fn subgroup_sum_report(h: &Subgroup) -> Result<SubgroupSumReport> {
    let f = h.modulus();
    let s = subgroup_sum_s(h)?;
    let tilde_s = subgroup_sum_tilde(h)?;
    let two_s_integer = (ExactRational::from_integer(2) * &s).to_integer();
    let n = if f >= 3 && is_prime(f) { Some(n_value(f, h)?) } else { None };
    Ok(SubgroupSumReport {
        modulus: f,
        order: h.order(),
        s,
        tilde_s,
        two_s_integer,
        n,
    })
}

fn euler_product(fact: &Factorization) -> ExactRational {
    let mut acc = ExactRational::one();
    for p in fact.primes() {
        acc = acc * ExactRational::ratio(p + 1, p);
    }
    acc
}

/// `M(f, {1}) = (π²/6)(φ(f)/f)(∏_{p | f}(1 + 1/p) - 3/f)`.
pub fn mean_square_closed_trivial(f: u64) -> Result<PiSquared> {
    if f < 3 {
        return Err(Error::invalid(format!("mean squares need f ≥ 3, got {f}")));
    }
    let fact = factorize(f)?;
    Ok(PiSquared::new(ExactRational::ratio(2u32, f) * tilde_s_one_from(f, &fact)))
}

/// `M(f, H₃) = (π²/6)(φ(f)/f)(∏_{p | f}(1 + 1/p) - 1/f)` for `H₃` built from `E_f`.
pub fn mean_square_closed_h3(f: u64) -> Result<PiSquared> {
    let fact = factorize(f)?;
    if f < 7 || fact.primes().any(|p| p % 3 != 1) {
        return Err(Error::invalid(format!("every prime divisor of {f} must be ≡ 1 (mod 3)")));
    }
    let inner = euler_product(&fact) - ExactRational::ratio(1u32, f);
    Ok(PiSquared::new(ExactRational::ratio(fact.totient(), 6 * f as u128) * inner))
}

/// `S(H_{p^n}, f)` for the kernel subgroup of `(ℤ/fℤ)* → (ℤ/f′ℤ)*`, `f = p^n f′`:
/// `((p^{n+1} + p^n - 1)/(12 p^{n+1}))·f - p^n/4 + p^n/(6f)`.
pub fn kernel_sum_closed(p: u64, n: u32, f_prime: u64) -> Result<ExactRational> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be ≥ 1"));
    }
    if f_prime <= 1 || f_prime % 2 == 0 || f_prime % p != 0 {
        return Err(Error::invalid(format!("f′ = {f_prime} must be odd, > 1 and divisible by {p}")));
    }
    let pn = BigInt::from(p).pow(n);
    let pn1 = &pn * p;
    let f = &pn * f_prime;
    let lead = ExactRational::ratio(&pn1 + &pn - 1u32, &pn1 * 12u32) * ExactRational::from_integer(f.clone());
    Ok(lead - ExactRational::ratio(pn.clone(), 4u32) + ExactRational::ratio(pn, f * 6u32))
}

/// Mean of `s(h, p^m)` over the units `h` of exact order `p^n`:
/// `f/(12 p^{2n}) - 1/4 + 1/(6f)` with `f = p^m`.
pub fn mean_order_closed(p: u64, m: u32, n: u32) -> Result<ExactRational> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if m < 2 || n == 0 || n >= m {
        return Err(Error::invalid(format!("need 1 ≤ n ≤ m - 1, got m = {m}, n = {n}")));
    }
    let f = BigInt::from(p).pow(m);
    let p2n = BigInt::from(p).pow(2 * n);
    Ok(ExactRational::ratio(f.clone(), p2n * 12u32) - ExactRational::ratio(1u32, 4u32)
        + ExactRational::ratio(1u32, f * 6u32))
}

/// `cot(πa/f)` for `1 ≤ a < f/2`, shared by every character modulo `f`.
struct CotTable {
    f: u64,
    cot: Vec<f64>,
}

impl CotTable {
    fn new(f: u64) -> Self {
        let cot = (1..f.div_ceil(2))
            .map(|a| 1.0 / (PI * a as f64 / f as f64).tan())
            .collect();
        CotTable { f, cot }
    }

    /// `L(1, χ) = (π/2f) Σ_{a=1}^{f-1} χ(a) cot(πa/f)`, folded over `a ↔ f - a`.
    fn l_one(&self, chi: &DirichletCharacter) -> Complex64 {
        let e = chi.table().exponent();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.cot.iter().enumerate() {
            if let Some(k) = chi.index(i as u64 + 1) {
                acc += root_of_unity(k, e) * c;
            }
        }
        acc * (PI / self.f as f64)
    }
}

/// Largest modulus accepted by the floating point routines.
pub const NUMERIC_MAX_MODULUS: u64 = 100_000;

/// `L(1, χ)` for an odd character, via the cotangent sum.
pub fn l_one_numeric(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_odd() {
        return Err(Error::invalid("L(1, χ) by the cotangent sum needs an odd character"));
    }
    if chi.modulus() > NUMERIC_MAX_MODULUS {
        return Err(Error::invalid(format!("numeric evaluation limited to f ≤ {NUMERIC_MAX_MODULUS}")));
    }
    Ok(CotTable::new(chi.modulus()).l_one(chi))
}

/// Average of `|L(1, χ)|²` over `X_f⁻(H)`.
///
/// Characters are evaluated in parallel; the squares are summed in the
/// fixed character order so the result does not depend on scheduling.
pub fn mean_square_numeric(h: &Subgroup) -> Result<f64> {
    let f = h.modulus();
    if f > NUMERIC_MAX_MODULUS {
        return Err(Error::invalid(format!("numeric evaluation limited to f ≤ {NUMERIC_MAX_MODULUS}")));
    }
    let chars = odd_characters_trivial_on(h)?;
    if chars.is_empty() {
        return Err(Error::invariant(format!("no odd characters mod {f} trivial on H")));
    }
    let table = CotTable::new(f);
    let squares: Vec<f64> = chars.par_iter().map(|chi| table.l_one(chi).norm_sqr()).collect();
    Ok(squares.iter().sum::<f64>() / chars.len() as f64)
}

/// `Π(f, H) = ∏_{q | f} ∏_{χ ∈ X_f⁻(H)} (1 - χ*(q)/q)`.
pub fn euler_correction_pi(h: &Subgroup) -> Result<f64> {
    let f = h.modulus();
    let chars = odd_characters_trivial_on(h)?;
    let primes: Vec<u64> = factorize(f)?.primes().collect();
    let mut acc = Complex64::new(1.0, 0.0);
    for chi in &chars {
        let d = chi.conductor();
        let e = chi.table().exponent();
        for &q in &primes {
            if let Some(k) = chi.primitive_index_with_conductor(q, d) {
                acc *= Complex64::new(1.0, 0.0) - root_of_unity(k, e) / q as f64;
            }
        }
    }
    if acc.im.abs() >= 1e-9 {
        return Err(Error::Precision(format!("Π(f, H) has imaginary part {}", acc.im)));
    }
    Ok(acc.re)
}
