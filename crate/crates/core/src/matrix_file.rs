//! Plain-text matrix files.
//!
//! ```text
//! # comment lines start with '#'
//! 2
//! 1.0 0.5
//! 0.5 2.0
//! ```
//!
//! The first non-comment line holds the order `n`, followed by exactly `n`
//! rows of `n` whitespace-separated reals. Blank lines are skipped. The
//! matrix is symmetrized as `(Q + Q^T) / 2` on load.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::linalg::SymMat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixFileError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("file is empty: expected the matrix order on the first non-comment line")]
    MissingOrder,
    #[error("line {line}: expected the matrix order as a positive integer, found '{found}'")]
    BadOrder { line: usize, found: String },
    #[error("line {line}, entry {entry}: '{found}' is not a finite real number")]
    BadEntry { line: usize, entry: usize, found: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    WrongRowLength { line: usize, expected: usize, found: usize },
    #[error("expected {expected} matrix rows, found {found}")]
    WrongRowCount { expected: usize, found: usize },
    #[error("line {line}: unexpected data after the last matrix row")]
    TrailingData { line: usize },
}

/// Parse a matrix from text.
pub fn parse_matrix(text: &str) -> Result<SymMat, MatrixFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, first) = lines.next().ok_or(MatrixFileError::MissingOrder)?;
    let n: usize = match first.parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return Err(MatrixFileError::BadOrder {
                line,
                found: first.to_string(),
            })
        }
    };

    let mut full = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line, text) in lines {
        if rows == n {
            return Err(MatrixFileError::TrailingData { line });
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != n {
            return Err(MatrixFileError::WrongRowLength {
                line,
                expected: n,
                found: fields.len(),
            });
        }
        for (j, f) in fields.iter().enumerate() {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => full.push(v),
                _ => {
                    return Err(MatrixFileError::BadEntry {
                        line,
                        entry: j + 1,
                        found: f.to_string(),
                    })
                }
            }
        }
        rows += 1;
    }
    if rows != n {
        return Err(MatrixFileError::WrongRowCount { expected: n, found: rows });
    }
    Ok(SymMat::from_full_symmetrized(n, &full).expect("entries checked finite"))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SymMat, MatrixFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| MatrixFileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_matrix(&text)
}

/// Render in the file format; values round-trip exactly.
pub fn format_matrix(q: &SymMat, comment: Option<&str>) -> String {
    let n = q.order();
    let mut out = String::new();
    if let Some(c) = comment {
        for l in c.lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    let _ = writeln!(out, "{n}");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:?}", q.get(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
