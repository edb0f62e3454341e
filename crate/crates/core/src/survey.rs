//! Scans over primes `p ≡ 1 (mod 2n)` recording the exact sign of
//! `N(H_n, p) = 12 S(H_n, p) - p`.
//!
//! For odd `n` the elements of `H_n` pair off as `h, h⁻¹`, and
//! `s(h⁻¹, p) = s(h, p)`, so only `(n + 1)/2` Dedekind sums are needed per
//! prime. They are accumulated as the integers `6p · s(h, p)`; no floating
//! point value takes part in the sign decision.
//!
//! Work is split into contiguous blocks of the prime range. Blocks run in
//! parallel, and their outcomes are merged in ascending order, so records and
//! counts do not depend on the number of workers. A [`Checkpoint`] is emitted
//! after every wave of blocks and a [`Survey`] can be resumed from it.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, mul_mod, pow_mod};
use crate::dedekind::{dedekind_sum, six_d_times};
use crate::sieve::primes_in_progression;
use crate::{Error, ExactRational, Result};

/// Integers per work block.
pub const DEFAULT_BLOCK: u64 = 1 << 20;

/// Header of the records CSV file.
pub const RECORDS_HEADER: [&str; 5] = ["p", "n", "two_S", "N", "nonpositive"];

/// Exact data for one pair `(p, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyRecord {
    pub p: u64,
    pub n: u64,
    /// `2 S(H_n, p)`.
    #[serde(rename = "two_S")]
    pub two_s: i128,
    /// `N(H_n, p) = 6 · two_S - p`.
    #[serde(rename = "N")]
    pub n_value: i128,
    pub nonpositive: bool,
}

impl SurveyRecord {
    /// Checks the arithmetic constraints every record must satisfy: `2S` has
    /// the parity of `(p-1)/2`, `N = 6·2S - p` is odd and its sign matches.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::invariant(format!("record {self:?}: {what}")));
        if self.n < 3 || self.n % 2 == 0 {
            return fail("n must be odd and ≥ 3");
        }
        if !is_prime(self.p) || self.p % (2 * self.n) != 1 {
            return fail("p must be a prime ≡ 1 (mod 2n)");
        }
        if self.two_s.rem_euclid(2) != (((self.p - 1) / 2) % 2) as i128 {
            return fail("2S does not have the parity of (p-1)/2");
        }
        if self.n_value != 6 * self.two_s - self.p as i128 {
            return fail("N ≠ 6·2S - p");
        }
        if self.n_value.rem_euclid(2) != 1 {
            return fail("N is even");
        }
        if self.nonpositive != (self.n_value <= 0) {
            return fail("sign flag disagrees with N");
        }
        Ok(())
    }
}

/// `6p · s(c, p)` as an integer.
fn six_p_s(c: u64, p: u64) -> Result<i128> {
    if let Some(v) = six_d_times(c, p) {
        return Ok(v);
    }
    let scaled = ExactRational::from_integer(6 * p as u128) * dedekind_sum(c as i64, p)?;
    scaled
        .to_integer()
        .and_then(|v| i128::try_from(v).ok())
        .ok_or_else(|| Error::invariant(format!("6p·s({c}, {p}) is not a 128-bit integer")))
}

/// An element of exact order `n`, from the smallest `x` whose power
/// `x^((p-1)/n)` has order `n`.
fn order_n_element(p: u64, n: u64, n_primes: &[u64]) -> u64 {
    let e = (p - 1) / n;
    (2..p)
        .map(|x| pow_mod(x, e, p))
        .find(|&h| n_primes.iter().all(|&q| pow_mod(h, n / q, p) != 1))
        .expect("(ℤ/pℤ)* is cyclic")
}

fn evaluate_with(p: u64, n: u64, n_primes: &[u64]) -> Result<SurveyRecord> {
    let h = order_n_element(p, n, n_primes);
    // The identity contributes 6p · s(1, p) = (p - 1)(p - 2)/2.
    let mut t: i128 = (p as i128 - 1) * (p as i128 - 2) / 2;
    let mut x = 1u64;
    for _ in 0..(n - 1) / 2 {
        x = mul_mod(x, h, p);
        t += 2 * six_p_s(x, p)?;
    }
    let three_p = 3 * p as i128;
    if t % three_p != 0 {
        return Err(Error::invariant(format!("2S(H_{n}, {p}) = {t}/{three_p} is not an integer")));
    }
    let two_s = t / three_p;
    let n_value = 6 * two_s - p as i128;
    let record = SurveyRecord {
        p,
        n,
        two_s,
        n_value,
        nonpositive: n_value <= 0,
    };
    record.validate()?;
    Ok(record)
}

/// The record for `(p, n)`: `n ≥ 3` odd, `p` prime with `p ≡ 1 (mod 2n)`.
pub fn evaluate_prime(p: u64, n: u64) -> Result<SurveyRecord> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::invalid(format!("n = {n} must be odd and ≥ 3")));
    }
    if !is_prime(p) || (p - 1) % n != 0 {
        return Err(Error::invalid(format!("{p} is not a prime with n = {n} dividing p - 1")));
    }
    let n_primes: Vec<u64> = factorize(n)?.primes().collect();
    evaluate_with(p, n, &n_primes)
}

/// Which pairs `(p, n)` a scan visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// `p ≡ 1 (mod 2n)`, `p ≤ B`.
    Limit,
    /// `p ≡ 1 (mod 2n)`, `A ≤ p ≤ A + B`.
    Window,
    /// Every odd `n | p - 1`, including `n = 1`, for `3 ≤ p ≤ B`.
    AllOdd,
}

/// Parameters of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanSpec {
    /// Subgroup order; `0` for [`ScanMode::AllOdd`].
    pub n: u64,
    pub mode: ScanMode,
    /// Window start `A`; `0` unless windowed.
    pub from: u64,
    /// `B`: the limit, or the window span.
    pub span_or_limit: u64,
}

fn check_n(n: u64) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::invalid(format!("n = {n} must be odd and ≥ 3")));
    }
    Ok(())
}

impl ScanSpec {
    pub fn fixed_n(n: u64, limit: u64) -> Result<Self> {
        check_n(n)?;
        Ok(ScanSpec {
            n,
            mode: ScanMode::Limit,
            from: 0,
            span_or_limit: limit,
        })
    }

    pub fn window(n: u64, from: u64, span: u64) -> Result<Self> {
        check_n(n)?;
        from.checked_add(span)
            .ok_or_else(|| Error::invalid("window end overflows u64"))?;
        Ok(ScanSpec {
            n,
            mode: ScanMode::Window,
            from,
            span_or_limit: span,
        })
    }

    pub fn all_odd(limit: u64) -> Result<Self> {
        if limit < 3 {
            return Err(Error::invalid(format!("limit {limit} must be ≥ 3")));
        }
        Ok(ScanSpec {
            n: 0,
            mode: ScanMode::AllOdd,
            from: 0,
            span_or_limit: limit,
        })
    }

    /// Inclusive bounds on `p`.
    pub fn bounds(&self) -> (u64, u64) {
        match self.mode {
            ScanMode::Window => (self.from, self.from + self.span_or_limit),
            ScanMode::Limit | ScanMode::AllOdd => (0, self.span_or_limit),
        }
    }

    pub fn range(&self) -> RangeDescriptor {
        match self.mode {
            ScanMode::Window => RangeDescriptor::Window {
                from: self.from,
                span: self.span_or_limit,
            },
            ScanMode::Limit | ScanMode::AllOdd => RangeDescriptor::Limit {
                limit: self.span_or_limit,
            },
        }
    }
}

/// `p ≤ B`, or `A ≤ p ≤ A + B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeDescriptor {
    Limit { limit: u64 },
    Window { from: u64, span: u64 },
}

/// Aggregated counts of a scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    /// `None` when every odd `n` is scanned.
    pub n: Option<u64>,
    pub range: RangeDescriptor,
    pub c_prime: u64,
    pub c_leq0: u64,
    /// `c_leq0 / c_prime` truncated to 10 places, or `"nan"` when `c_prime = 0`.
    pub rho: String,
}

/// `num / den` truncated to `places` decimals.
pub fn truncated_ratio(num: u64, den: u64, places: u32) -> String {
    if den == 0 {
        return "nan".to_owned();
    }
    let scale = 10u128.pow(places);
    let q = num as u128 * scale / den as u128;
    if places == 0 {
        return q.to_string();
    }
    format!("{}.{:0width$}", q / scale, q % scale, width = places as usize)
}

impl DensityReport {
    /// `ρ` truncated to `places` decimals.
    pub fn rho_places(&self, places: u32) -> String {
        truncated_ratio(self.c_leq0, self.c_prime, places)
    }
}

/// Resumable scan state, serialised as
/// `{n, mode, A, span_or_B, last_p, c_prime, c_leq0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub n: u64,
    pub mode: ScanMode,
    #[serde(rename = "A")]
    pub from: u64,
    #[serde(rename = "span_or_B")]
    pub span_or_limit: u64,
    /// Largest prime already processed, if any.
    pub last_p: Option<u64>,
    pub c_prime: u64,
    pub c_leq0: u64,
}

impl Checkpoint {
    fn fresh(spec: &ScanSpec) -> Self {
        Checkpoint {
            n: spec.n,
            mode: spec.mode,
            from: spec.from,
            span_or_limit: spec.span_or_limit,
            last_p: None,
            c_prime: 0,
            c_leq0: 0,
        }
    }

    pub fn spec(&self) -> Result<ScanSpec> {
        match self.mode {
            ScanMode::Limit => ScanSpec::fixed_n(self.n, self.span_or_limit),
            ScanMode::Window => ScanSpec::window(self.n, self.from, self.span_or_limit),
            ScanMode::AllOdd => {
                if self.n != 0 || self.from != 0 {
                    return Err(Error::Parse("all-odd checkpoints carry n = 0 and A = 0".into()));
                }
                ScanSpec::all_odd(self.span_or_limit)
            }
        }
    }

    /// Structural checks beyond the JSON schema.
    pub fn validate(&self) -> Result<()> {
        let spec = self.spec().map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
        if self.mode == ScanMode::Limit && self.from != 0 {
            return Err(Error::Parse("limit checkpoints carry A = 0".into()));
        }
        if self.c_leq0 > self.c_prime {
            return Err(Error::Parse("checkpoint has c_leq0 > c_prime".into()));
        }
        let (lo, hi) = spec.bounds();
        match self.last_p {
            Some(p) if p < lo || p > hi || !is_prime(p) => {
                Err(Error::Parse(format!("checkpoint last_p = {p} is not a prime in [{lo}, {hi}]")))
            }
            None if self.c_prime != 0 => Err(Error::Parse("checkpoint counts without last_p".into())),
            _ => Ok(()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ckpt: Checkpoint =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
        ckpt.validate()?;
        Ok(ckpt)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serialises")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Writes through a temporary file and a rename, so a crash leaves either
    /// the old or the new checkpoint on disk.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = temp_path(path);
    let mut file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

struct BlockOutcome {
    records: Vec<SurveyRecord>,
    c_prime: u64,
    c_leq0: u64,
    last_p: Option<u64>,
}

fn process_block(spec: &ScanSpec, n_primes: &[u64], lo: u64, hi: u64) -> Result<BlockOutcome> {
    let mut out = BlockOutcome {
        records: Vec::new(),
        c_prime: 0,
        c_leq0: 0,
        last_p: None,
    };
    match spec.mode {
        ScanMode::Limit | ScanMode::Window => {
            for p in primes_in_progression(lo, hi - lo, 2 * spec.n, 1)? {
                let r = evaluate_with(p, spec.n, n_primes)?;
                out.c_prime += 1;
                out.c_leq0 += r.nonpositive as u64;
                out.records.push(r);
                out.last_p = Some(p);
            }
        }
        ScanMode::AllOdd => {
            for p in primes_in_progression(lo.max(3), hi.saturating_sub(lo.max(3)), 1, 0)? {
                if p > hi {
                    break;
                }
                for n in factorize(p - 1)?.divisors().into_iter().filter(|d| d % 2 == 1) {
                    out.c_prime += 1;
                    if n == 1 {
                        // N = (2 - 3p)/p < 0 for every p.
                        out.c_leq0 += 1;
                        continue;
                    }
                    let primes: Vec<u64> = factorize(n)?.primes().collect();
                    let r = evaluate_with(p, n, &primes)?;
                    out.c_leq0 += r.nonpositive as u64;
                    out.records.push(r);
                }
                out.last_p = Some(p);
            }
        }
    }
    Ok(out)
}

/// A resumable scan.
pub struct Survey {
    spec: ScanSpec,
    state: Checkpoint,
    n_primes: Vec<u64>,
    block: u64,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Survey {
    pub fn new(spec: ScanSpec) -> Result<Self> {
        let n_primes = if spec.n >= 3 { factorize(spec.n)?.primes().collect() } else { Vec::new() };
        Ok(Survey {
            state: Checkpoint::fresh(&spec),
            spec,
            n_primes,
            block: DEFAULT_BLOCK,
            pool: None,
        })
    }

    /// Continues from `ckpt`, which must describe the same scan.
    pub fn resume(spec: ScanSpec, ckpt: Checkpoint) -> Result<Self> {
        ckpt.validate()?;
        let expected = Checkpoint::fresh(&spec);
        if (ckpt.n, ckpt.mode, ckpt.from, ckpt.span_or_limit)
            != (expected.n, expected.mode, expected.from, expected.span_or_limit)
        {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint is for n = {}, mode = {:?}, A = {}, B = {}; requested n = {}, mode = {:?}, A = {}, B = {}",
                ckpt.n, ckpt.mode, ckpt.from, ckpt.span_or_limit, spec.n, spec.mode, spec.from, spec.span_or_limit
            )));
        }
        let mut survey = Survey::new(spec)?;
        survey.state = ckpt;
        Ok(survey)
    }

    /// Uses a dedicated pool of `threads` workers instead of the global one.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        self.pool = Some(Arc::new(pool));
        Ok(self)
    }

    /// Integers per work block; smaller blocks mean more frequent checkpoints.
    pub fn with_block_size(mut self, block: u64) -> Self {
        self.block = block.max(1);
        self
    }

    pub fn spec(&self) -> &ScanSpec {
        &self.spec
    }

    pub fn checkpoint(&self) -> &Checkpoint {
        &self.state
    }

    pub fn report(&self) -> DensityReport {
        DensityReport {
            n: (self.spec.mode != ScanMode::AllOdd).then_some(self.spec.n),
            range: self.spec.range(),
            c_prime: self.state.c_prime,
            c_leq0: self.state.c_leq0,
            rho: truncated_ratio(self.state.c_leq0, self.state.c_prime, 10),
        }
    }

    /// Runs to the end of the range.
    pub fn run(
        &mut self,
        sink: &mut dyn FnMut(&SurveyRecord) -> Result<()>,
        on_checkpoint: &mut dyn FnMut(&Checkpoint) -> Result<()>,
    ) -> Result<DensityReport> {
        self.run_until(u64::MAX, sink, on_checkpoint)
    }

    /// Processes the primes `≤ stop` that remain, then returns the partial report.
    pub fn run_until(
        &mut self,
        stop: u64,
        sink: &mut dyn FnMut(&SurveyRecord) -> Result<()>,
        on_checkpoint: &mut dyn FnMut(&Checkpoint) -> Result<()>,
    ) -> Result<DensityReport> {
        let (lo, hi) = self.spec.bounds();
        let start = match self.state.last_p {
            Some(p) => p + 1,
            None => lo,
        };
        let end = hi.min(stop);
        if start > end {
            return Ok(self.report());
        }
        let mut blocks = Vec::new();
        let mut b = start;
        loop {
            let e = b.saturating_add(self.block - 1).min(end);
            blocks.push((b, e));
            if e == end {
                break;
            }
            b = e + 1;
        }
        let width = self.pool.as_ref().map_or_else(rayon::current_num_threads, |p| p.current_num_threads());
        for wave in blocks.chunks(2 * width.max(1)) {
            let spec = self.spec;
            let n_primes = &self.n_primes;
            let work = || -> Vec<Result<BlockOutcome>> {
                wave.par_iter().map(|&(l, h)| process_block(&spec, n_primes, l, h)).collect()
            };
            let outcomes = match &self.pool {
                Some(pool) => pool.install(work),
                None => work(),
            };
            for outcome in outcomes {
                let outcome = outcome?;
                for r in &outcome.records {
                    sink(r)?;
                }
                self.state.c_prime += outcome.c_prime;
                self.state.c_leq0 += outcome.c_leq0;
                if outcome.last_p.is_some() {
                    self.state.last_p = outcome.last_p;
                }
            }
            on_checkpoint(&self.state)?;
        }
        Ok(self.report())
    }
}

fn no_records(_: &SurveyRecord) -> Result<()> {
    Ok(())
}

fn no_checkpoints(_: &Checkpoint) -> Result<()> {
    Ok(())
}

fn scan(spec: ScanSpec) -> Result<DensityReport> {
    Survey::new(spec)?.run(&mut no_records, &mut no_checkpoints)
}

/// `ρ_n(B)` data for primes `p ≡ 1 (mod 2n)`, `p ≤ B`.
pub fn scan_fixed_n(n: u64, limit: u64) -> Result<DensityReport> {
    scan(ScanSpec::fixed_n(n, limit)?)
}

/// `ρ_n(A, B)` data for primes `p ≡ 1 (mod 2n)`, `A ≤ p ≤ A + B`.
pub fn scan_window(n: u64, from: u64, span: u64) -> Result<DensityReport> {
    scan(ScanSpec::window(n, from, span)?)
}

/// Counts over all pairs `(p, n)` with `n` odd, `n | p - 1`, `3 ≤ p ≤ B`.
pub fn scan_all_odd_subgroups(limit: u64) -> Result<DensityReport> {
    scan(ScanSpec::all_odd(limit)?)
}

fn record_row(r: &SurveyRecord) -> [String; 5] {
    [
        r.p.to_string(),
        r.n.to_string(),
        r.two_s.to_string(),
        r.n_value.to_string(),
        r.nonpositive.to_string(),
    ]
}

/// Writes records as CSV with the [`RECORDS_HEADER`] header.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl RecordWriter<File> {
    /// Creates `path`, writing the header.
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        RecordWriter::new(file, true)
    }

    /// Appends to an existing records file, writing the header only if empty.
    pub fn append(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let empty = file.metadata().map_err(|e| Error::io(path, e))?.len() == 0;
        RecordWriter::new(file, empty)
    }
}

impl<W: Write> RecordWriter<W> {
    pub fn new(writer: W, header: bool) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        if header {
            inner.write_record(RECORDS_HEADER).map_err(csv_error)?;
        }
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, r: &SurveyRecord) -> Result<()> {
        self.inner.write_record(record_row(r)).map_err(csv_error)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::Parse(format!("records: {e}")))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("records: {e}"))
}

fn parse_field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = row.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::Parse(format!("records line {line}: bad {} value {raw:?}", RECORDS_HEADER[i])))
}

/// Parses and validates a records CSV.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<SurveyRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(RECORDS_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("records header must be {}", RECORDS_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_error)?;
        let line = i as u64 + 2;
        let nonpositive = match row.get(4) {
            Some("true") => true,
            Some("false") => false,
            other => return Err(Error::Parse(format!("records line {line}: bad nonpositive value {other:?}"))),
        };
        let record = SurveyRecord {
            p: parse_field(&row, 0, line)?,
            n: parse_field(&row, 1, line)?,
            two_s: parse_field(&row, 2, line)?,
            n_value: parse_field(&row, 3, line)?,
            nonpositive,
        };
        record
            .validate()
            .map_err(|e| Error::Parse(format!("records line {line}: {e}")))?;
        out.push(record);
    }
    Ok(out)
}

/// Drops rows with `p > last_p` so that a resumed scan can append without
/// duplicating output written after the checkpoint.
pub fn truncate_records(path: &Path, last_p: Option<u64>) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let kept: Vec<SurveyRecord> = read_records(file)?
        .into_iter()
        .filter(|r| last_p.is_some_and(|lp| r.p <= lp))
        .collect();
    let mut buf = RecordWriter::new(Vec::new(), true)?;
    for r in &kept {
        buf.write(r)?;
    }
    let bytes = buf
        .inner
        .into_inner()
        .map_err(|e| Error::Parse(format!("records: {e}")))?;
    write_atomic(path, &bytes)
}
