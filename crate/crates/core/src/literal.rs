//! Integer literals as written in tables and on the command line:
//! `100000`, `100_000`, `1e5`, `10^5`.

use crate::{Error, Result};

fn parse_plain(s: &str) -> Result<u64> {
    let digits: String = s.chars().filter(|&c| c != '_').collect();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || s.starts_with('_') || s.ends_with('_') {
        return Err(Error::Parse(format!("invalid integer {s:?}")));
    }
    digits
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("integer {s:?} does not fit in 64 bits")))
}

fn power(base: u64, exp: u64, original: &str) -> Result<u64> {
    let exp = u32::try_from(exp).map_err(|_| Error::Parse(format!("exponent too large in {original:?}")))?;
    base.checked_pow(exp)
        .ok_or_else(|| Error::Parse(format!("{original:?} does not fit in 64 bits")))
}

/// Parses a non-negative integer literal.
pub fn parse_integer(s: &str) -> Result<u64> {
    let t = s.trim();
    if let Some((base, exp)) = t.split_once('^') {
        let b = parse_plain(base)?;
        let e = parse_plain(exp)?;
        return power(b, e, s);
    }
    if let Some((mantissa, exp)) = t.split_once(['e', 'E']) {
        let m = parse_plain(mantissa)?;
        let e = parse_plain(exp)?;
        return m
            .checked_mul(power(10, e, s)?)
            .ok_or_else(|| Error::Parse(format!("{s:?} does not fit in 64 bits")));
    }
    parse_plain(t)
}

/// Renders `n` as `10^k` when it is a power of ten above 10, else in decimal.
pub fn format_integer(n: u64) -> String {
    if n >= 100 {
        let mut k = 0u32;
        let mut m = n;
        while m % 10 == 0 {
            m /= 10;
            k += 1;
        }
        if m == 1 {
            return format!("10^{k}");
        }
    }
    n.to_string()
}
