//! Sparse matrix storage and the products the Lanczos recurrences need.
//!
//! A [`SparseMatrix`] keeps both a compressed-row and a compressed-column
//! copy of its entries so that `A x` and `Aᵀ y` are both gather-style loops.
//! Products with `A` are tallied in a [`MatvecCounter`]; products with `Aᵀ`
//! are not, which matches the usual convention of reporting one product per
//! Lanczos step.

mod market;

pub use market::{parse_matrix_market, read_matrix_market, write_matrix_market, MarketError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparseError {
    #[error("dimension mismatch: expected vector of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
}

/// Number of products with `A` performed during one solver run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct MatvecCounter {
    count_a: u64,
}

impl MatvecCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count_a
    }

    fn tick(&mut self) {
        self.count_a += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Compressed {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Compressed {
    /// Builds compressed storage keyed on `major` from (major, minor, value) triples.
    fn build(n_major: usize, triples: impl Iterator<Item = (usize, usize, f64)> + Clone) -> Self {
        let mut ptr = vec![0usize; n_major + 1];
        for (major, _, _) in triples.clone() {
            ptr[major + 1] += 1;
        }
        for i in 0..n_major {
            ptr[i + 1] += ptr[i];
        }
        let nnz = ptr[n_major];
        let mut next = ptr.clone();
        let mut idx = vec![0usize; nnz];
        let mut val = vec![0.0; nnz];
        for (major, minor, v) in triples {
            let slot = next[major];
            idx[slot] = minor;
            val[slot] = v;
            next[major] += 1;
        }
        // sort each lane by minor index so traversal order is canonical
        for i in 0..n_major {
            let (lo, hi) = (ptr[i], ptr[i + 1]);
            let mut lane: Vec<(usize, f64)> = (lo..hi).map(|s| (idx[s], val[s])).collect();
            lane.sort_by_key(|&(j, _)| j);
            for (s, (j, v)) in (lo..hi).zip(lane) {
                idx[s] = j;
                val[s] = v;
            }
        }
        Self { ptr, idx, val }
    }

    fn lane(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.ptr[i], self.ptr[i + 1]);
        self.idx[lo..hi].iter().copied().zip(self.val[lo..hi].iter().copied())
    }
}

/// Immutable real sparse matrix with row- and column-major traversal.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    by_row: Compressed,
    by_col: Compressed,
}

impl SparseMatrix {
    /// Builds a matrix from 0-based `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are rejected rather than summed. Explicit zeros
    /// are stored as given.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        if rows == 0 || cols == 0 {
            return Err(SparseError::EmptyShape { rows, cols });
        }
        for &(r, c, _) in triplets {
            if r >= rows || c >= cols {
                return Err(SparseError::OutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
        }
        let by_row = Compressed::build(rows, triplets.iter().map(|&(r, c, v)| (r, c, v)));
        for r in 0..rows {
            let lane: Vec<usize> = by_row.lane(r).map(|(c, _)| c).collect();
            if let Some(w) = lane.windows(2).find(|w| w[0] == w[1]) {
                return Err(SparseError::Duplicate { row: r, col: w[0] });
            }
        }
        let by_col = Compressed::build(cols, triplets.iter().map(|&(r, c, v)| (c, r, v)));
        Ok(Self {
            rows,
            cols,
            by_row,
            by_col,
        })
    }

    /// Dense row-major input; exact zeros are dropped.
    pub fn from_dense(rows: usize, cols: usize, values: &[f64]) -> Result<Self, SparseError> {
        if values.len() != rows * cols {
            return Err(SparseError::DimensionMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        let triplets: Vec<_> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, &v)| (k / cols, k % cols, v))
            .collect();
        Self::from_triplets(rows, cols, &triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.by_row.val.len()
    }

    /// Stored entries in row-major order, 0-based.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.by_row.lane(r).map(move |(c, v)| (r, c, v)))
    }

    /// Row-major dense expansion.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for (r, c, v) in self.triplets() {
            out[r * self.cols + c] = v;
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            by_row: self.by_col.clone(),
            by_col: self.by_row.clone(),
        }
    }

    /// `A x`, counted.
    pub fn matvec(&self, x: &[f64], counter: &mut MatvecCounter) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.cols {
            return Err(SparseError::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        counter.tick();
        Ok((0..self.rows)
            .map(|r| self.by_row.lane(r).map(|(c, v)| v * x[c]).sum())
            .collect())
    }

    /// `Aᵀ y`, not counted.
    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>, SparseError> {
        if y.len() != self.rows {
            return Err(SparseError::DimensionMismatch {
                expected: self.rows,
                actual: y.len(),
            });
        }
        Ok((0..self.cols)
            .map(|c| self.by_col.lane(c).map(|(r, v)| v * y[r]).sum())
            .collect())
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| self.by_col.lane(c).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
