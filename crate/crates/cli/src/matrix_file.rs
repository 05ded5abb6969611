//! Plain-text complex matrix format.
//!
//! ```text
//! # comment lines start with '#'; blank lines are ignored
//! 2 2
//! 2,0 1,-1
//! 1,1 3,0
//! ```
//!
//! The first non-comment line holds the row and column counts. Each of the
//! following `rows` lines holds `cols` whitespace-separated `re,im` tokens.
//! Values are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use cholinv_core::{DenseMatrix, Matrix, C64};

use crate::{CliError, CliResult};

pub fn read(path: &Path) -> CliResult<DenseMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|(line, msg)| CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

/// Parses the text format. Errors carry a 1-based line number.
pub fn parse(text: &str) -> Result<DenseMatrix, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or((1, "missing \"rows cols\" header".to_string()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [rows, cols] = dims[..] else {
        return Err((hline, format!("expected \"rows cols\", got {header:?}")));
    };
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| (hline, format!("bad dimension {s:?}")))
    };
    let (rows, cols) = (dim(rows)?, dim(cols)?);

    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (lno, line) = lines
            .next()
            .ok_or((hline, format!("expected {rows} rows, found {r}")))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_token(tok).map_err(|msg| (lno, msg))?);
        }
        let got = data.len() - before;
        if got != cols {
            return Err((lno, format!("expected {cols} entries, found {got}")));
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err((lno, format!("unexpected content after {rows} rows")));
    }
    Matrix::new(rows, cols, data).map_err(|e| (hline, e.to_string()))
}

fn parse_token(tok: &str) -> Result<C64, String> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| format!("expected re,im, got {tok:?}"))?;
    let num = |s: &str| match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("bad number {s:?} in {tok:?}")),
    };
    Ok(C64::new(num(re)?, num(im)?))
}

pub fn format(m: &DenseMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        for (j, z) in m.row(i).iter().enumerate() {
            let sep = if j == 0 { "" } else { " " };
            write!(out, "{sep}{:.16e},{:.16e}", z.re, z.im).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One value per line, as used for LDL pivots.
pub fn format_reals(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}\n")).collect()
}
