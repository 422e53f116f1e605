//! CSV encoding of result rows.

use std::path::Path;
use std::str::FromStr;

use super::{Metric, ResultRow};
use crate::error::{Error, Result};
use crate::receivers::Receiver;

pub const HEADER: &str = "sweep_value,receiver,metric,value,ci_halfwidth";

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders rows as CSV text with LF line endings.
pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&fmt_f64(r.sweep_value));
        out.push(',');
        out.push_str(r.receiver.as_str());
        out.push(',');
        out.push_str(r.metric.as_str());
        out.push(',');
        out.push_str(&fmt_f64(r.value));
        out.push(',');
        if let Some(ci) = r.ci_halfwidth {
            out.push_str(&fmt_f64(ci));
        }
        out.push('\n');
    }
    out
}

/// Writes rows to `path`, replacing any existing file.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(rows)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field.parse().map_err(|_| Error::Parse(format!("line {line}: bad number {field:?}")))
}

/// Parses CSV text produced by [`to_csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(HEADER) => {}
        other => return Err(Error::Parse(format!("expected header {HEADER:?}, found {other:?}"))),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(Error::Parse(format!("line {line}: expected 5 fields, found {}", f.len())));
            }
            Ok(ResultRow {
                sweep_value: parse_f64(f[0], line)?,
                receiver: Receiver::from_str(f[1])?,
                metric: Metric::from_str(f[2])?,
                value: parse_f64(f[3], line)?,
                ci_halfwidth: if f[4].is_empty() { None } else { Some(parse_f64(f[4], line)?) },
            })
        })
        .collect()
}
