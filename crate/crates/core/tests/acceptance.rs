//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use dedekind_core::arith::{factorize, gcd};
use dedekind_core::class_number::{
    cyclotomic_simplified_bound, relative_class_number_with, upper_bound_h3_field, DEFAULT_PRECISION_BITS,
    ROUNDING_TOLERANCE,
};
use dedekind_core::dedekind::{dedekind_sum, dedekind_sum_naive, dedekind_sum_tilde};
use dedekind_core::eisenstein::order3_subgroups_from_ef;
use dedekind_core::mean_square::{mean_square_exact, mean_square_numeric, n_value, subgroup_sum_tilde};
use dedekind_core::sieve::primes_up_to;
use dedekind_core::survey::{evaluate_prime, scan_fixed_n, scan_window};
use dedekind_core::units::{cyclic_subgroups, kernel_subgroup, subgroup_of_order, Subgroup};
use dedekind_core::verify::{run_suite, Suite, VerifyOptions, DEFAULT_SEED};
use dedekind_core::ExactRational;

type Outcome = Result<String, String>;

fn r(s: &str) -> ExactRational {
    s.parse().expect("valid rational literal")
}

fn density_rows(limit: u64, rows: &[(u64, u64, u64)]) -> Outcome {
    for &(n, c_prime, c_leq0) in rows {
        let got = scan_fixed_n(n, limit).map_err(|e| e.to_string())?;
        if (got.c_prime, got.c_leq0) != (c_prime, c_leq0) {
            return Err(format!(
                "n = {n}: expected ({c_prime}, {c_leq0}), got ({}, {})",
                got.c_prime, got.c_leq0
            ));
        }
    }
    Ok(format!("{} rows", rows.len()))
}

fn criterion_1() -> Outcome {
    density_rows(
        100_000,
        &[(5, 2387, 1335), (7, 1593, 823), (9, 1592, 838), (11, 945, 506), (13, 798, 397), (15, 1189, 648)],
    )
}

fn criterion_2() -> Outcome {
    density_rows(
        1_000_000,
        &[(9, 13063, 6820), (5, 19617, 10403), (7, 13063, 6770), (11, 7858, 4099), (13, 6539, 3307), (15, 9807, 5129)],
    )
}

fn criterion_3() -> Outcome {
    let got = scan_window(9, 10_000_000_000, 1_000_000).map_err(|e| e.to_string())?;
    let rho = got.rho_places(5);
    if (got.c_prime, got.c_leq0, rho.as_str()) != (7226, 3695, "0.51134") {
        return Err(format!("got ({}, {}, {rho})", got.c_prime, got.c_leq0));
    }
    Ok(format!("(7226, 3695), rho = {}", got.rho))
}

fn criterion_4() -> Outcome {
    let check = |what: &str, expected: &str, got: dedekind_core::Result<ExactRational>| -> Result<(), String> {
        match got {
            Ok(v) if v == r(expected) => Ok(()),
            other => Err(format!("{what}: expected {expected}, got {other:?}")),
        }
    };
    check("s̃(29, 91)", "-22/91", dedekind_sum_tilde(29, 91))?;
    check("s̃(53, 91)", "-46/91", dedekind_sum_tilde(53, 91))?;
    check("s̃(9, 91)", "6/91", dedekind_sum_tilde(9, 91))?;
    check("S̃(⟨29⟩)", "610/91", Subgroup::cyclic(29, 91).and_then(|h| subgroup_sum_tilde(&h)))?;
    check("S̃(⟨53⟩)", "562/91", Subgroup::cyclic(53, 91).and_then(|h| subgroup_sum_tilde(&h)))?;
    let subs = order3_subgroups_from_ef(91).map_err(|e| e.to_string())?;
    if subs.len() != 2 {
        return Err(format!("expected 2 subgroups from E_91, got {}", subs.len()));
    }
    for h in &subs {
        check(&format!("S̃({:?})", h.elements()), "666/91", subgroup_sum_tilde(h))?;
    }
    Ok("7 exact values".into())
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    for p in primes_up_to(10_000).into_iter().filter(|p| p % 6 == 1) {
        let exact = subgroup_of_order(3, p).and_then(|h| n_value(p, &h)).map_err(|e| e.to_string())?;
        let fast = evaluate_prime(p, 3).map_err(|e| e.to_string())?;
        if exact != r("-1") || fast.n_value != -1 {
            return Err(format!("p = {p}: N = {exact} (subgroup sum), {} (survey)", fast.n_value));
        }
        count += 1;
    }
    Ok(format!("{count} primes"))
}

fn criterion_6() -> Outcome {
    for n in [3u32, 5, 7, 13] {
        let p = (1u64 << n) - 1;
        let h = Subgroup::cyclic(2, p).map_err(|e| e.to_string())?;
        let got = n_value(p, &h).map_err(|e| e.to_string())?;
        let expected = 2 * p as i64 - (6 * n as i64 - 3);
        if h.order() != n as u64 || got != ExactRational::from_integer(expected) {
            return Err(format!("p = {p}: expected {expected}, got {got}"));
        }
    }
    Ok("p = 7, 31, 127, 8191".into())
}

fn criterion_7() -> Outcome {
    let mut pairs = 0u64;
    for d in 1..=300u64 {
        for c in 0..d {
            if gcd(c, d) != 1 {
                continue;
            }
            let fast = dedekind_sum(c as i64, d).map_err(|e| e.to_string())?;
            let naive = dedekind_sum_naive(c as i64, d).map_err(|e| e.to_string())?;
            if fast != naive {
                return Err(format!("s({c}, {d}): fast {fast}, naive {naive}"));
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn criterion_8() -> Outcome {
    let mut pairs = Vec::new();
    for f in [7u64, 9, 15, 21, 45, 63, 91, 105, 175, 225, 243, 455, 512, 999, 1001, 1155, 1729, 2000] {
        pairs.push(Subgroup::cyclic(1, f).map_err(|e| e.to_string())?);
        for d in factorize(f).map_err(|e| e.to_string())?.divisors() {
            if d > 1 && d < f {
                let k = kernel_subgroup(f, d).map_err(|e| e.to_string())?;
                if k.order() > 1 && !k.contains_minus_one() {
                    pairs.push(k);
                }
            }
        }
        let cyclic: Vec<Subgroup> = cyclic_subgroups(f)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|h| h.order() > 1 && !h.contains_minus_one())
            .collect();
        pairs.extend(cyclic.into_iter().step_by(7).take(3));
    }
    pairs.sort_by(|a, b| (a.modulus(), a.elements()).cmp(&(b.modulus(), b.elements())));
    pairs.dedup();
    let kernels = pairs
        .iter()
        .filter(|h| h.order() > 1 && factorize(h.modulus()).map(|f| f.distinct() > 1).unwrap_or(false))
        .count();
    let mut worst = 0.0f64;
    for h in &pairs {
        let exact = mean_square_exact(h).map_err(|e| e.to_string())?.to_f64();
        let numeric = mean_square_numeric(h).map_err(|e| e.to_string())?;
        let rel = ((numeric - exact) / exact).abs();
        if rel >= 1e-8 {
            return Err(format!("f = {}, #H = {}: relative error {rel:e}", h.modulus(), h.order()));
        }
        worst = worst.max(rel);
    }
    if pairs.len() < 50 || kernels == 0 {
        return Err(format!("only {} pairs ({kernels} nontrivial with composite f)", pairs.len()));
    }
    Ok(format!("{} pairs, worst relative error {worst:.1e}", pairs.len()))
}

fn suite(s: Suite, max: Option<u64>, min_cases: u64) -> Outcome {
    let report = run_suite(
        s,
        &VerifyOptions {
            max_modulus: max,
            seed: DEFAULT_SEED,
        },
    );
    if !report.ok() || report.run < min_cases {
        return Err(report.to_string());
    }
    Ok(format!("{}/{} cases", report.passed, report.run))
}

fn criterion_9() -> Outcome {
    // 4 primes × 2 exponents × (3 or 4 distinct f′) × 5 checks per grid point.
    suite(Suite::KernelTheorem, Some(u64::MAX), 140)
}

fn criterion_10() -> Outcome {
    suite(Suite::Constancy, Some(117_649), 1_000)
}

fn criterion_11() -> Outcome {
    let a = suite(Suite::Denominators, Some(1_000), 10_000)?;
    let b = suite(Suite::TheoremParity, Some(1_000), 1_000)?;
    Ok(format!("denominators {a}; parity {b}"))
}

fn criterion_12() -> Outcome {
    suite(Suite::Eisenstein, Some(10_000), 1_000)
}

fn criterion_13() -> Outcome {
    let v = relative_class_number_with(23, 22, DEFAULT_PRECISION_BITS).map_err(|e| e.to_string())?;
    if v.h_minus != 3u32.into() || v.residual >= ROUNDING_TOLERANCE {
        return Err(format!("h⁻(ℚ(ζ₂₃)) = {} with residual {}", v.h_minus, v.residual));
    }
    for p in [7u64, 11, 13, 19, 23] {
        let h = relative_class_number_with(p, p - 1, DEFAULT_PRECISION_BITS).map_err(|e| e.to_string())?;
        let bound = cyclotomic_simplified_bound(p);
        if h.residual >= ROUNDING_TOLERANCE || h.h_minus.to_string().parse::<f64>().unwrap_or(f64::INFINITY) > bound {
            return Err(format!("p = {p}: h⁻ = {} vs bound {bound}", h.h_minus));
        }
    }
    for p in [7u64, 13, 19, 31, 37, 43] {
        let m = (p - 1) / 3;
        let h = relative_class_number_with(p, m, DEFAULT_PRECISION_BITS).map_err(|e| e.to_string())?;
        let b = upper_bound_h3_field(p).map_err(|e| e.to_string())?;
        let hf = h.h_minus.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
        if h.residual >= ROUNDING_TOLERANCE || hf > b.m_based * (1.0 + 1e-12) || b.m_based > b.simplified {
            return Err(format!("p = {p}: {hf} ≤ {} ≤ {} fails", b.m_based, b.simplified));
        }
    }
    Ok(format!("h⁻(ℚ(ζ₂₃)) = 3, residual {:.1e}", v.residual))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("density rows at B = 10^5", criterion_1),
        ("density rows at B = 10^6", criterion_2),
        ("windowed density at A = 10^10, B = 10^6", criterion_3),
        ("restricted sums modulo 91", criterion_4),
        ("N(H_3, p) = -1 for p ≤ 10^4", criterion_5),
        ("Mersenne prime identity", criterion_6),
        ("fast Dedekind sums equal the sawtooth oracle, d ≤ 300", criterion_7),
        ("numeric mean squares agree with exact values", criterion_8),
        ("kernel subgroup closed form and consequences", criterion_9),
        ("constancy for small orders and mean value formula", criterion_10),
        ("denominator bound and trace parity", criterion_11),
        ("Eisenstein ratio sets and closed form", criterion_12),
        ("relative class numbers and bounds", criterion_13),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
