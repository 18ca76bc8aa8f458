//! CSV output with fixed, platform-independent number formatting.

use std::path::Path;

use crate::error::{CliError, Result};
use crate::experiment::{sort_rows, ResultRow};

pub const HEADER: [&str; 5] = ["pair", "direction", "quantity", "value", "aux"];

/// `x` rounded to `digits` significant digits. Plain decimal notation for
/// decimal exponents in `[-5, 15)`, scientific notation otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let ds: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), ds)
    } else {
        let int_len = exp as usize + 1;
        if int_len >= ds.len() {
            format!("{}{}", ds, "0".repeat(int_len - ds.len()))
        } else {
            format!("{}.{}", &ds[..int_len], &ds[int_len..])
        }
    };
    format!("{sign}{body}")
}

/// Writes `rows` in canonical order under the fixed header.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(err)?;
    w.write_record(HEADER).map_err(err)?;
    for r in &sorted {
        w.write_record([
            r.pair.as_str(),
            r.direction.as_str(),
            r.quantity.as_str(),
            &format_sig(r.value, 12),
            &format_sig(r.aux, 12),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let header = r.headers().map_err(err)?.clone();
    if header.iter().ne(HEADER) {
        return Err(CliError::config(path.display().to_string(), "unexpected CSV header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(err)?;
        let field = |j: usize| rec.get(j).unwrap_or_default();
        let bad = |what: &str| CliError::config(format!("{}:{}", path.display(), i + 2), what.to_string());
        rows.push(ResultRow {
            pair: field(0).to_string(),
            direction: field(1).parse().map_err(|e: String| bad(&e))?,
            quantity: field(2).to_string(),
            value: field(3).parse().map_err(|_| bad("bad value"))?,
            aux: field(4).parse().map_err(|_| bad("bad aux"))?,
        });
    }
    Ok(rows)
}
