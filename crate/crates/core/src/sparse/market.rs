//! Matrix Market exchange format.
//!
//! Supported headers are `coordinate real general`, `coordinate real symmetric`
//! and `array real general`; `integer` fields are read as reals. Symmetric
//! storage is expanded to the full matrix while parsing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{SparseError, SparseMatrix};

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported Matrix Market format: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: entry ({row}, {col}) outside declared {rows}x{cols} bounds")]
    Bounds {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("size line declares {declared} entries but {found} were read")]
    CountMismatch { declared: usize, found: usize },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<(Layout, Symmetry), MarketError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(MarketError::Header(line.trim().to_string()));
    }
    if tokens[1] != "matrix" {
        return Err(MarketError::Unsupported(format!("object `{}`", tokens[1])));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(MarketError::Header(format!("unknown format `{other}`"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" => {}
        "complex" | "pattern" => {
            return Err(MarketError::Unsupported(format!("field `{}`", tokens[3])))
        }
        other => return Err(MarketError::Header(format!("unknown field `{other}`"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" if layout == Layout::Coordinate => Symmetry::Symmetric,
        "symmetric" | "skew-symmetric" | "hermitian" => {
            return Err(MarketError::Unsupported(format!(
                "{} {} storage",
                tokens[2], tokens[4]
            )))
        }
        other => return Err(MarketError::Header(format!("unknown symmetry `{other}`"))),
    };
    Ok((layout, symmetry))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, MarketError> {
    let tok = tok.ok_or_else(|| MarketError::Format {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| MarketError::Format {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

/// Parses Matrix Market text into a [`SparseMatrix`].
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix, MarketError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| MarketError::Header("empty input".into()))?;
    let (layout, symmetry) = parse_header(header)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = body
        .next()
        .ok_or_else(|| MarketError::Format { line: 1, msg: "missing size line".into() })?;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), size_line, "row count")?;
    let cols: usize = parse_num(toks.next(), size_line, "column count")?;
    if rows == 0 || cols == 0 {
        return Err(MarketError::Format {
            line: size_line,
            msg: format!("matrix dimensions must be positive, got {rows}x{cols}"),
        });
    }

    let mut triplets = Vec::new();
    match layout {
        Layout::Coordinate => {
            let declared: usize = parse_num(toks.next(), size_line, "entry count")?;
            let mut found = 0usize;
            for (line, text) in body {
                let mut t = text.split_whitespace();
                let r: usize = parse_num(t.next(), line, "row index")?;
                let c: usize = parse_num(t.next(), line, "column index")?;
                let v: f64 = parse_num(t.next(), line, "value")?;
                if r == 0 || c == 0 || r > rows || c > cols {
                    return Err(MarketError::Bounds { line, row: r, col: c, rows, cols });
                }
                found += 1;
                triplets.push((r - 1, c - 1, v));
                if symmetry == Symmetry::Symmetric && r != c {
                    if c > rows || r > cols {
                        return Err(MarketError::Bounds { line, row: c, col: r, rows, cols });
                    }
                    triplets.push((c - 1, r - 1, v));
                }
            }
            if found != declared {
                return Err(MarketError::CountMismatch { declared, found });
            }
        }
        Layout::Array => {
            let declared = rows * cols;
            let mut found = 0usize;
            for (line, text) in body {
                for tok in text.split_whitespace() {
                    let v: f64 = parse_num(Some(tok), line, "value")?;
                    if found < declared {
                        // column-major
                        let (r, c) = (found % rows, found / rows);
                        if v != 0.0 {
                            triplets.push((r, c, v));
                        }
                    }
                    found += 1;
                }
            }
            if found != declared {
                return Err(MarketError::CountMismatch { declared, found });
            }
        }
    }

    SparseMatrix::from_triplets(rows, cols, &triplets).map_err(|e| match e {
        SparseError::Duplicate { row, col } => MarketError::Duplicate { row: row + 1, col: col + 1 },
        other => MarketError::Format { line: size_line, msg: other.to_string() },
    })
}

/// Reads and parses a Matrix Market file.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix, MarketError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MarketError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_market(&text)
}

/// Serializes as `coordinate real general` with round-trip exact values.
pub fn write_matrix_market(a: &SparseMatrix) -> String {
    let mut out = String::with_capacity(32 * a.nnz() + 64);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for (r, c, v) in a.triplets() {
        let _ = writeln!(out, "{} {} {:e}", r + 1, c + 1, v);
    }
    out
}
