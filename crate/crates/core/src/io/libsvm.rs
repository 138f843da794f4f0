//! LIBSVM text format: `<label> (<idx>:<val> )*` with 1-based indices.
//!
//! Blank lines and lines starting with `#` are skipped. Labels `-1`/`0` map to
//! the negative class and `+1`/`1` to the positive class.

use std::io::{BufRead, Write};

use crate::data::{Dataset, Label, LabeledExample, SparseVector};
use crate::error::{Error, Result};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_label(token: &str, line: usize) -> Result<Label> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_error(line, format!("unparseable label '{token}'")))?;
    if value == 1.0 {
        Ok(Label::Positive)
    } else if value == -1.0 || value == 0.0 {
        Ok(Label::Negative)
    } else {
        Err(parse_error(
            line,
            format!("label '{token}' not in {{-1, 0, +1}}"),
        ))
    }
}

/// Parses a whole stream. `dim` overrides the inferred dimension (the largest
/// index seen) and must be at least that large.
pub fn parse_libsvm<R: BufRead>(reader: R, dim: Option<usize>) -> Result<Dataset> {
    let mut rows: Vec<(Vec<(usize, f64)>, Label)> = Vec::new();
    let mut max_index = 0usize;
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| parse_error(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_ascii_whitespace();
        let label = parse_label(tokens.next().unwrap_or_default(), lineno)?;
        let mut entries = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_error(lineno, format!("expected index:value, got '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_error(lineno, format!("unparseable index '{idx}'")))?;
            if idx == 0 {
                return Err(parse_error(lineno, "indices are 1-based"));
            }
            if idx <= prev {
                return Err(parse_error(
                    lineno,
                    format!("index {idx} does not increase after {prev}"),
                ));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_error(lineno, format!("unparseable value '{val}'")))?;
            if !val.is_finite() {
                return Err(parse_error(lineno, format!("non-finite value '{tok}'")));
            }
            prev = idx;
            entries.push((idx - 1, val));
        }
        max_index = max_index.max(prev);
        rows.push((entries, label));
    }
    let dim = match dim {
        Some(d) if d < max_index => {
            return Err(Error::InvalidParameter(format!(
                "dim {d} smaller than largest feature index {max_index}"
            )))
        }
        Some(d) => d,
        None => max_index.max(1),
    };
    let examples = rows
        .into_iter()
        .map(|(entries, y)| Ok(LabeledExample::new(SparseVector::new(entries, dim)?, y)))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(examples, dim)
}

/// Writes one line per example; values use shortest round-trip formatting.
pub fn write_libsvm<W: Write>(data: &Dataset, mut out: W) -> Result<()> {
    for e in data.examples() {
        out.write_all(if e.y == Label::Positive { b"+1" } else { b"-1" })?;
        for (i, v) in e.x.iter() {
            write!(out, " {}:{}", i + 1, v)?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
