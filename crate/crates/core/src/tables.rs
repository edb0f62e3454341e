//! Density tables `ρ_n(B)` for `B = 10^5, 10^6, …` and windowed rows
//! `ρ_n(A, B)`, rendered as `B | c_prime | c_leq0 | ρ…` with five truncated
//! decimals.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::literal::format_integer;
use crate::survey::{truncated_ratio, DensityReport, ScanSpec, Survey};
use crate::{Error, Result};

/// Smallest limit that starts a table.
pub const FIRST_LIMIT: u64 = 100_000;

/// Decimals shown in the `ρ` column.
pub const RHO_PLACES: u32 = 5;

/// A named table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableName {
    /// `ρ_n(B)` for odd `n ∈ {5, …, 15}`.
    Rho(u64),
    /// `ρ_9(A, B)`.
    Rho9Window,
}

impl FromStr for TableName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rho9-window" {
            return Ok(TableName::Rho9Window);
        }
        match s.strip_prefix("rho").and_then(|n| n.parse::<u64>().ok()) {
            Some(n @ (5 | 7 | 9 | 11 | 13 | 15)) => Ok(TableName::Rho(n)),
            _ => Err(Error::invalid(format!(
                "unknown table {s:?}; expected rho5, rho7, rho9, rho11, rho13, rho15 or rho9-window"
            ))),
        }
    }
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableName::Rho(n) => write!(f, "rho{n}"),
            TableName::Rho9Window => f.write_str("rho9-window"),
        }
    }
}

/// One rendered row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    /// `A`, for windowed rows.
    pub from: Option<u64>,
    /// The limit, or the window span.
    pub span_or_limit: u64,
    pub c_prime: u64,
    pub c_leq0: u64,
}

impl TableRow {
    fn from_report(from: Option<u64>, span_or_limit: u64, r: &DensityReport) -> Self {
        TableRow {
            from,
            span_or_limit,
            c_prime: r.c_prime,
            c_leq0: r.c_leq0,
        }
    }

    /// `c_leq0 / c_prime` truncated to five places.
    pub fn rho(&self) -> String {
        truncated_ratio(self.c_leq0, self.c_prime, RHO_PLACES)
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.from {
            write!(f, "{} | ", format_integer(a))?;
        }
        write!(
            f,
            "{} | {} | {} | {}…",
            format_integer(self.span_or_limit),
            self.c_prime,
            self.c_leq0,
            self.rho()
        )
    }
}

/// Rows of `ρ_n(B)` for `B = 10^5, 10^6, …` up to `limit`, from a single scan
/// that pauses at each power of ten.
pub fn rho_table(n: u64, limit: u64, threads: Option<usize>) -> Result<Vec<TableRow>> {
    if limit < FIRST_LIMIT {
        return Err(Error::invalid(format!("table limit {limit} is below 10^5")));
    }
    let mut survey = Survey::new(ScanSpec::fixed_n(n, limit)?)?;
    if let Some(t) = threads {
        survey = survey.with_threads(t)?;
    }
    let mut rows = Vec::new();
    let mut b = FIRST_LIMIT;
    loop {
        let report = survey.run_until(b, &mut |_| Ok(()), &mut |_| Ok(()))?;
        rows.push(TableRow::from_report(None, b, &report));
        match b.checked_mul(10) {
            Some(next) if next <= limit => b = next,
            _ => return Ok(rows),
        }
    }
}

/// The windowed row `ρ_n(A, B)`.
pub fn window_row(n: u64, from: u64, span: u64, threads: Option<usize>) -> Result<TableRow> {
    let mut survey = Survey::new(ScanSpec::window(n, from, span)?)?;
    if let Some(t) = threads {
        survey = survey.with_threads(t)?;
    }
    let report = survey.run(&mut |_| Ok(()), &mut |_| Ok(()))?;
    Ok(TableRow::from_report(Some(from), span, &report))
}

/// Column header for a table.
pub fn header(name: TableName) -> String {
    match name {
        TableName::Rho(n) => format!("B | c_prime | c_leq0 | rho_{n}(B)"),
        TableName::Rho9Window => "A | B | c_prime(A,B) | c_leq0(A,B) | rho_9(A,B)".to_owned(),
    }
}
