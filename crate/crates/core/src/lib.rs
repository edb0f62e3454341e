//! Exact Dedekind sums and the mean square values of `L(1, χ)` over character
//! subgroups.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`], [`arith`], [`sieve`]: exact rationals, factorisation,
//!   multiplicative functions and segmented prime enumeration.
//! * [`dedekind`]: `s(c, d)` by the sawtooth definition and by reciprocity,
//!   the restricted sums `s̃(c, f)` and the closed forms built on them.
//! * [`units`] and [`characters`]: the group `(ℤ/fℤ)*`, its subgroups and its
//!   Dirichlet characters.
//! * [`mean_square`]: subgroup sums `S(H, f)`, `S̃(H, f)` and the exact mean
//!   square values `M(f, H)` as rational multiples of `π²`, with a numeric
//!   cross-check through `L(1, χ)`.
//! * [`eisenstein`]: representations `f = a² + ab + b²` and the order-3
//!   subgroups they generate.
//! * [`class_number`]: relative class numbers of imaginary subfields of
//!   `ℚ(ζ_p)` and upper bounds derived from mean square values.
//! * [`survey`]: parallel scans over primes computing the sign of
//!   `N(H_n, p) = 12 S(H_n, p) - p`.
//! * [`verify`] and [`tables`]: batch checks and table rendering used by the
//!   `dsum` command-line tool.

pub mod arith;
pub mod characters;
pub mod class_number;
pub mod dedekind;
pub mod eisenstein;
mod error;
pub mod literal;
pub mod mean_square;
pub mod rational;
pub mod sieve;
pub mod survey;
pub mod tables;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use rational::ExactRational;
