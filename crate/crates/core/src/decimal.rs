//! Exact decimal parsing and formatting.
//!
//! Inputs such as weights, cut-levels and published credibility values are
//! short decimals. They are parsed straight into scaled integers so that no
//! binary floating point is ever involved in a comparison.

use crate::error::{Error, Result};

/// Parses `text` as a decimal and returns it multiplied by `10^decimals`.
///
/// Fails when the value carries more significant fractional digits than
/// `decimals` (trailing zeros are accepted).
pub fn parse_scaled(text: &str, decimals: u32) -> Result<i64> {
    let s = text.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty())
        || !all_digits(int_part)
        || !all_digits(frac_part)
    {
        return Err(Error::format(text, "not a decimal number"));
    }
    let significant = frac_part.trim_end_matches('0');
    if significant.len() > decimals as usize {
        return Err(Error::format(
            text,
            format!("more than {decimals} decimal place(s)"),
        ));
    }
    let overflow = || Error::format(text, "value too large");
    let mut value: i64 = 0;
    for b in int_part.bytes() {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add(i64::from(b - b'0')))
            .ok_or_else(overflow)?;
    }
    for i in 0..decimals as usize {
        let digit = significant.as_bytes().get(i).map_or(0, |b| b - b'0');
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add(i64::from(digit)))
            .ok_or_else(overflow)?;
    }
    Ok(if negative { -value } else { value })
}

/// Formats a value stored in thousandths, keeping at least `min_decimals`
/// fractional digits and dropping further trailing zeros.
pub fn format_milli(value: i64, min_decimals: usize) -> String {
    let sign = if value < 0 { "-" } else { "" };
    let abs = value.unsigned_abs();
    let mut frac = format!("{:03}", abs % 1000);
    while frac.len() > min_decimals && frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}{}", abs / 1000)
    } else {
        format!("{sign}{}.{frac}", abs / 1000)
    }
}

/// Rounds the non-negative fraction `num/den` half-up to thousandths.
pub fn round_half_up_milli(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0 && num >= 0);
    (2 * 1000 * num + den) / (2 * den)
}
