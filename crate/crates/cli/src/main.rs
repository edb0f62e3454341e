//! `dsum`: command-line access to Dedekind sums, subgroup mean squares,
//! relative class numbers, prime surveys and the verification suites.

use std::cell::RefCell;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dedekind_core::arith::factorize;
use dedekind_core::class_number::class_number_report;
use dedekind_core::dedekind::{dedekind_sum, dedekind_sum_naive, dedekind_sum_tilde};
use dedekind_core::eisenstein::{dedekind_at_ratio, e_f, order3_subgroups_from_ef, representations};
use dedekind_core::literal::parse_integer;
use dedekind_core::mean_square::{
    euler_correction_pi, mean_square_closed_h3, mean_square_exact, mean_square_numeric, subgroup_sum_s,
    subgroup_sum_tilde,
};
use dedekind_core::survey::{
    truncate_records, Checkpoint, DensityReport, RecordWriter, ScanSpec, Survey, SurveyRecord,
};
use dedekind_core::tables::{header, rho_table, window_row, TableName};
use dedekind_core::units::{kernel_subgroup, Subgroup};
use dedekind_core::verify::{run_all, run_suite, Suite, VerifyOptions, DEFAULT_SEED};
use dedekind_core::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "dsum", version, about = "Exact Dedekind sums, mean squares of L(1, χ) and prime surveys")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "DSUM_THREADS", value_parser = int)]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The Dedekind sum s(c, d).
    Dedekind(DedekindArgs),
    /// Prime factorisation and arithmetic functions of n.
    Factor(FactorArgs),
    /// Exact and numeric mean square of L(1, χ) over odd characters trivial on H.
    MeanSquare(MeanSquareArgs),
    /// Representations f = a² + ab + b² and the ratio set E_f.
    Ef(EfArgs),
    /// Relative class number of the degree-m subfield of ℚ(ζ_p) with its bounds.
    ClassNumber(ClassNumberArgs),
    /// Scan primes p ≡ 1 (mod 2n) for the sign of N(H_n, p).
    Survey(SurveyArgs),
    /// Density tables in the published column layout.
    Tables(TablesArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurveyFormat {
    Json,
    Csv,
}

fn int(s: &str) -> Result<u64, String> {
    parse_integer(s).map_err(|e| e.to_string())
}

fn signed(s: &str) -> Result<i64, String> {
    match s.strip_prefix('-') {
        Some(rest) => {
            let v = int(rest)?;
            i64::try_from(v).map(|v| -v).map_err(|_| format!("{s} is out of range"))
        }
        None => i64::try_from(int(s)?).map_err(|_| format!("{s} is out of range")),
    }
}

#[derive(Args)]
struct DedekindArgs {
    #[arg(allow_negative_numbers = true, value_parser = signed)]
    c: i64,
    #[arg(value_parser = int)]
    d: u64,
    /// Evaluate the defining sawtooth sum directly.
    #[arg(long, conflicts_with = "tilde")]
    naive: bool,
    /// The sum restricted to indices prime to d.
    #[arg(long)]
    tilde: bool,
    /// Print a decimal with this many places instead of the exact fraction.
    #[arg(long)]
    decimal: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    out: Format,
}

#[derive(Args)]
struct FactorArgs {
    #[arg(value_parser = int)]
    n: u64,
    #[arg(long, value_enum, default_value = "text")]
    out: Format,
}

#[derive(Args)]
struct MeanSquareArgs {
    /// Modulus f.
    #[arg(long, value_parser = int)]
    f: u64,
    /// Generators of H; the trivial subgroup when omitted.
    #[arg(long = "gen", value_parser = int, conflicts_with = "kernel")]
    generators: Vec<u64>,
    /// Use the kernel of reduction modulo f′ as H.
    #[arg(long, value_parser = int)]
    kernel: Option<u64>,
    /// Also evaluate the mean square and Euler correction numerically.
    #[arg(long)]
    numeric: bool,
    /// Significant digits for the decimal approximation of M.
    #[arg(long)]
    decimal: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    out: Format,
}

#[derive(Args)]
struct EfArgs {
    #[arg(long, value_parser = int)]
    f: u64,
}

#[derive(Args)]
struct ClassNumberArgs {
    #[arg(long, value_parser = int)]
    p: u64,
    /// Degree m of the subfield; p - 1 when omitted.
    #[arg(long, value_parser = int)]
    degree: Option<u64>,
}

#[derive(Args)]
struct SurveyArgs {
    /// Subgroup order n (odd, ≥ 3).
    #[arg(long, value_parser = int, required_unless_present = "all_odd")]
    n: Option<u64>,
    /// Scan p ≤ LIMIT.
    #[arg(long, value_parser = int, required_unless_present = "span")]
    limit: Option<u64>,
    /// Window start A.
    #[arg(long, value_parser = int, requires = "span", conflicts_with = "limit")]
    from: Option<u64>,
    /// Window span B, scanning A ≤ p ≤ A + B.
    #[arg(long, value_parser = int, requires = "from")]
    span: Option<u64>,
    /// Count every pair (p, n) with n odd dividing p - 1.
    #[arg(long, conflicts_with_all = ["n", "from"])]
    all_odd: bool,
    /// Report as JSON, or stream records as CSV to standard output.
    #[arg(long, value_enum, default_value = "json")]
    out: SurveyFormat,
    /// Write records to this CSV file.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Checkpoint file; an existing one is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// rho5, rho7, rho9, rho11, rho13, rho15 or rho9-window.
    #[arg(long)]
    table: String,
    /// Largest B for the limit tables.
    #[arg(long, value_parser = int, default_value = "100000")]
    limit: u64,
    /// Window start A for rho9-window.
    #[arg(long, value_parser = int)]
    from: Option<u64>,
    /// Window span B for rho9-window.
    #[arg(long, value_parser = int)]
    span: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    out: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// reciprocity, denominators, theorem-parity, kernel-theorem, constancy,
    /// mean-square, eisenstein, class-number or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Largest modulus or prime tried; each suite has its own default.
    #[arg(long, value_parser = int)]
    max_modulus: Option<u64>,
    /// Seed for the randomised cases.
    #[arg(long, value_parser = int, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    out: Format,
}

/// A failure that maps to a specific exit status.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let usage = e.chain().any(|cause| {
            matches!(
                cause.downcast_ref::<Error>(),
                Some(
                    Error::InvalidArgument(_)
                        | Error::NotCoprime { .. }
                        | Error::MinusOneInSubgroup(_)
                        | Error::Parse(_)
                        | Error::CheckpointMismatch(_)
                )
            )
        });
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_dedekind(a: DedekindArgs) -> Outcome {
    let (kind, value) = if a.tilde {
        ("tilde", dedekind_sum_tilde(a.c, a.d)?)
    } else if a.naive {
        ("naive", dedekind_sum_naive(a.c, a.d)?)
    } else {
        ("s", dedekind_sum(a.c, a.d)?)
    };
    let shown = match a.decimal {
        Some(places) => value.to_decimal(places),
        None => value.to_string(),
    };
    match a.out {
        Format::Text => println!("{shown}"),
        Format::Json => print_json(&json!({ "c": a.c, "d": a.d, "kind": kind, "value": shown }))?,
    }
    Ok(())
}

fn cmd_factor(a: FactorArgs) -> Outcome {
    let fact = factorize(a.n)?;
    match a.out {
        Format::Text => {
            let parts: Vec<String> = fact
                .pairs()
                .iter()
                .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
                .collect();
            let rendered = if parts.is_empty() { "1".to_owned() } else { parts.join(" · ") };
            println!("{} = {rendered}", a.n);
            println!("totient {}", fact.totient());
            println!("mobius {}", fact.mobius());
            println!("carmichael {}", fact.carmichael());
            println!("divisors {}", fact.divisors().len());
        }
        Format::Json => print_json(&json!({
            "n": a.n,
            "factors": fact.pairs(),
            "totient": fact.totient(),
            "mobius": fact.mobius(),
            "carmichael": fact.carmichael(),
            "divisors": fact.divisors(),
        }))?,
    }
    Ok(())
}

fn cmd_mean_square(a: MeanSquareArgs) -> Outcome {
    let h = match a.kernel {
        Some(fp) => kernel_subgroup(a.f, fp)?,
        None if a.generators.is_empty() => Subgroup::cyclic(1, a.f)?,
        None => Subgroup::generated_by(&a.generators, a.f)?,
    };
    let m = mean_square_exact(&h)?;
    let s = subgroup_sum_s(&h)?;
    let tilde = subgroup_sum_tilde(&h)?;
    let numeric = if a.numeric {
        Some((mean_square_numeric(&h)?, euler_correction_pi(&h)?))
    } else {
        None
    };
    match a.out {
        Format::Text => {
            println!("H = {:?} (order {}) mod {}", h.elements(), h.order(), a.f);
            println!("S = {s}");
            println!("S~ = {tilde}");
            match a.decimal {
                Some(d) => println!("M = {}", m.approx_decimal(d)),
                None => println!("M = {m}"),
            }
            if let Some((num, pi)) = numeric {
                println!("M (numeric) = {num:.15}");
                println!("Euler correction = {pi:.15}");
            }
        }
        Format::Json => {
            let mut v = json!({
                "f": a.f,
                "subgroup": h.elements(),
                "order": h.order(),
                "S": s,
                "tilde_S": tilde,
                "mean_square": m,
            });
            if let Some(d) = a.decimal {
                v["mean_square_decimal"] = json!(m.approx_decimal(d));
            }
            if let Some((num, pi)) = numeric {
                v["numeric"] = json!(num);
                v["euler_correction"] = json!(pi);
            }
            print_json(&v)?;
        }
    }
    Ok(())
}

fn cmd_ef(a: EfArgs) -> Outcome {
    let f = a.f;
    let reps = representations(f)?;
    let ratios = e_f(f)?;
    let subgroups = order3_subgroups_from_ef(f)?;
    let fact = factorize(f)?;
    let closed = mean_square_closed_h3(f)?;
    let closed_form = subgroups
        .iter()
        .map(|h| mean_square_exact(h).map(|m| m == closed))
        .collect::<Result<Vec<bool>, Error>>()?;
    let divisors: Vec<u64> = fact.divisors().into_iter().filter(|&d| d > 1).collect();
    let ratio_sums = ratios
        .iter()
        .all(|r| divisors.iter().all(|&delta| dedekind_at_ratio(f, delta, r).is_ok()));
    print_json(&json!({
        "f": f,
        "representations": reps,
        "ratios": ratios.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        "subgroups": subgroups.iter().map(|h| h.elements()).collect::<Vec<_>>(),
        "checks": {
            "cardinality": ratios.len() == 1 << fact.distinct(),
            "closed_form": closed_form,
            "dedekind_at_divisors": ratio_sums,
        },
    }))?;
    Ok(())
}

fn cmd_class_number(a: ClassNumberArgs) -> Outcome {
    let m = a.degree.unwrap_or(a.p.saturating_sub(1));
    let report = class_number_report(a.p, m)?;
    print_json(&report)?;
    Ok(())
}

fn survey_spec(a: &SurveyArgs) -> Result<ScanSpec, Error> {
    if a.all_odd {
        let limit = a
            .limit
            .ok_or_else(|| Error::InvalidArgument("--all-odd needs --limit".into()))?;
        return ScanSpec::all_odd(limit);
    }
    let n = a.n.expect("clap requires --n");
    match (a.from, a.span, a.limit) {
        (Some(from), Some(span), _) => ScanSpec::window(n, from, span),
        (_, _, Some(limit)) => ScanSpec::fixed_n(n, limit),
        _ => Err(Error::InvalidArgument("give --limit, or --from with --span".into())),
    }
}

fn cmd_survey(a: SurveyArgs) -> Outcome {
    let spec = survey_spec(&a)?;
    let resumed = match &a.checkpoint {
        Some(path) if path.exists() => Some(Checkpoint::read(path)?),
        _ => None,
    };
    let mut survey = match resumed {
        Some(ckpt) => {
            if let Some(records) = &a.records {
                if records.exists() {
                    truncate_records(records, ckpt.last_p)?;
                }
            }
            Survey::resume(spec, ckpt)?
        }
        None => Survey::new(spec)?,
    };
    let resuming = survey.checkpoint().last_p.is_some();

    let file_writer = RefCell::new(match &a.records {
        Some(path) if resuming => Some(RecordWriter::append(path)?),
        Some(path) => Some(RecordWriter::create(path)?),
        None => None,
    });
    let stdout_writer = RefCell::new(match a.out {
        SurveyFormat::Csv => Some(RecordWriter::new(io::stdout().lock(), true)?),
        SurveyFormat::Json => None,
    });
    let mut sink = |r: &SurveyRecord| -> dedekind_core::Result<()> {
        if let Some(w) = file_writer.borrow_mut().as_mut() {
            w.write(r)?;
        }
        if let Some(w) = stdout_writer.borrow_mut().as_mut() {
            w.write(r)?;
        }
        Ok(())
    };
    // Records are flushed before each checkpoint so that the file never
    // lags behind the checkpoint it is truncated against on resume.
    let mut on_checkpoint = |c: &Checkpoint| -> dedekind_core::Result<()> {
        if let Some(w) = file_writer.borrow_mut().as_mut() {
            w.flush()?;
        }
        if let Some(path) = &a.checkpoint {
            c.write_atomic(path)?;
        }
        Ok(())
    };
    let report: DensityReport = survey.run(&mut sink, &mut on_checkpoint)?;
    if let Some(w) = file_writer.borrow_mut().as_mut() {
        w.flush()?;
    }
    if let Some(w) = stdout_writer.borrow_mut().as_mut() {
        w.flush()?;
    }
    match a.out {
        SurveyFormat::Json => print_json(&report)?,
        SurveyFormat::Csv => eprintln!(
            "c_prime = {}, c_leq0 = {}, rho = {}",
            report.c_prime, report.c_leq0, report.rho
        ),
    }
    Ok(())
}

fn cmd_tables(a: TablesArgs, threads: Option<usize>) -> Outcome {
    let name: TableName = a.table.parse()?;
    let rows = match name {
        TableName::Rho(n) => rho_table(n, a.limit, threads)?,
        TableName::Rho9Window => {
            let (Some(from), Some(span)) = (a.from, a.span) else {
                return Err(Failure::Usage(anyhow::anyhow!("rho9-window needs --from and --span")));
            };
            vec![window_row(9, from, span, threads)?]
        }
    };
    match a.out {
        Format::Text => {
            println!("{}", header(name));
            for row in &rows {
                println!("{row}");
            }
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "from": r.from,
                        "span_or_limit": r.span_or_limit,
                        "c_prime": r.c_prime,
                        "c_leq0": r.c_leq0,
                        "rho": r.rho(),
                    })
                })
                .collect();
            print_json(&json!({ "table": name.to_string(), "rows": rows }))?;
        }
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let opts = VerifyOptions {
        max_modulus: a.max_modulus,
        seed: a.seed,
    };
    let reports = if a.suite == "all" {
        run_all(&opts)
    } else {
        vec![run_suite(a.suite.parse::<Suite>()?, &opts)]
    };
    match a.out {
        Format::Text => {
            for r in &reports {
                println!("{} {r}", if r.ok() { "ok  " } else { "FAIL" });
            }
        }
        Format::Json => print_json(&reports)?,
    }
    if reports.iter().all(|r| r.ok()) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli) -> Outcome {
    let threads = cli.threads.map(|t| t.max(1) as usize);
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Dedekind(a) => cmd_dedekind(a),
        Command::Factor(a) => cmd_factor(a),
        Command::MeanSquare(a) => cmd_mean_square(a),
        Command::Ef(a) => cmd_ef(a),
        Command::ClassNumber(a) => cmd_class_number(a),
        Command::Survey(a) => cmd_survey(a),
        Command::Tables(a) => cmd_tables(a, threads),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Output piped into a reader that exits early, such as `head`.
fn closed_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        cause.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || cause
                .downcast_ref::<serde_json::Error>()
                .and_then(|j| j.io_error_kind())
                .is_some_and(|k| k == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Runtime(e)) if closed_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
