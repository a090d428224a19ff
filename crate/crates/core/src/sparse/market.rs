//! Matrix Market import/export for symmetric matrices.
//!
//! Uses the coordinate format with the `symmetric` qualifier: only the lower
//! triangle is written, indices are 1-based, and values use Rust's shortest
//! round-trip float formatting so export/import is bit-exact.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::sparse::matrix::{SparseSymBuilder, SparseSymMatrix};

const HEADER: &str = "%%MatrixMarket matrix coordinate real symmetric";

/// Writes `a` in Matrix Market symmetric coordinate format.
pub fn write_matrix_market(a: &SparseSymMatrix, mut w: impl Write) -> Result<()> {
    let lower: Vec<(usize, usize, f64)> =
        a.upper_triplets().map(|(i, j, v)| (j, i, v)).collect();
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {} {}", a.order(), a.order(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Reads a symmetric real coordinate Matrix Market stream.
pub fn read_matrix_market(r: impl Read) -> Result<SparseSymMatrix> {
    let reader = BufReader::new(r);
    let mut builder: Option<SparseSymBuilder> = None;
    let mut declared_entries = 0usize;
    let mut seen_entries = 0usize;
    let mut header_ok = false;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if lineno == 1 {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let expected: Vec<&str> = HEADER.split_whitespace().collect();
            if fields.len() != expected.len()
                || !fields.iter().zip(&expected).all(|(a, b)| a.eq_ignore_ascii_case(b))
            {
                return Err(Error::MatrixMarket {
                    line: lineno,
                    msg: format!("expected header '{HEADER}'"),
                });
            }
            header_ok = true;
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if builder.is_none() {
            if fields.len() != 3 {
                return Err(Error::MatrixMarket {
                    line: lineno,
                    msg: "expected size line 'rows cols nnz'".into(),
                });
            }
            let rows: usize = fields[0].parse().map_err(|_| Error::MatrixMarket {
                line: lineno,
                msg: "bad row count".into(),
            })?;
            let cols: usize = fields[1].parse().map_err(|_| Error::MatrixMarket {
                line: lineno,
                msg: "bad column count".into(),
            })?;
            if rows != cols {
                return Err(Error::MatrixMarket {
                    line: lineno,
                    msg: format!("symmetric matrix must be square, got {rows}x{cols}"),
                });
            }
            declared_entries = fields[2].parse().map_err(|_| Error::MatrixMarket {
                line: lineno,
                msg: "bad entry count".into(),
            })?;
            builder = Some(SparseSymBuilder::new(rows).map_err(|e| Error::MatrixMarket {
                line: lineno,
                msg: e.to_string(),
            })?);
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::MatrixMarket {
                line: lineno,
                msg: "expected entry line 'i j value'".into(),
            });
        }
        let i: usize = fields[0].parse().map_err(|_| Error::MatrixMarket {
            line: lineno,
            msg: "bad row index".into(),
        })?;
        let j: usize = fields[1].parse().map_err(|_| Error::MatrixMarket {
            line: lineno,
            msg: "bad column index".into(),
        })?;
        let v: f64 = fields[2].parse().map_err(|_| Error::MatrixMarket {
            line: lineno,
            msg: "bad value".into(),
        })?;
        if i == 0 || j == 0 {
            return Err(Error::MatrixMarket { line: lineno, msg: "indices are 1-based".into() });
        }
        builder
            .as_mut()
            .unwrap()
            .insert(i - 1, j - 1, v)
            .map_err(|e| Error::MatrixMarket { line: lineno, msg: e.to_string() })?;
        seen_entries += 1;
    }

    if !header_ok {
        return Err(Error::MatrixMarket { line: 1, msg: "empty input".into() });
    }
    let builder = builder.ok_or(Error::MatrixMarket { line: 2, msg: "missing size line".into() })?;
    if seen_entries != declared_entries {
        return Err(Error::MatrixMarket {
            line: 0,
            msg: format!("declared {declared_entries} entries, found {seen_entries}"),
        });
    }
    builder.finalize()
}
