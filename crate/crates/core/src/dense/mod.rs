//! Small dense linear algebra used on the projected problems.
//!
//! The projected matrices never exceed a few hundred rows, so everything here
//! is a plain row-major loop nest. [`jacobi_svd`] is an independent reference
//! used by tests; the solver itself never calls it.

mod bidiag_qr;
mod cholesky;
mod givens;
mod jacobi;
mod sym_eig;

pub use bidiag_qr::{bidiag_qr_step, BidiagQrOutcome};
pub use cholesky::cholesky;
pub(crate) use cholesky::{backward_solve_transposed, forward_solve};
pub use givens::{givens, GivensRotation};
pub use jacobi::{jacobi_svd, JacobiSvd};
pub use sym_eig::{sym_eig, SymEig};

use std::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("matrix is not symmetric (asymmetry {asymmetry:e} relative to norm)")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("{routine} did not converge within its iteration budget")]
    NoConvergence { routine: &'static str },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// # Panics
    /// If `values.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * cols, "value count does not match shape");
        Self { rows, cols, values }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            values.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, values)
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Upper bidiagonal matrix with diagonal `alphas` and superdiagonal `betas`.
    pub fn upper_bidiagonal(alphas: &[f64], betas: &[f64]) -> Self {
        let n = alphas.len();
        assert!(betas.len() + 1 >= n, "superdiagonal too short");
        let mut m = Self::from_diag(alphas);
        for i in 0..n.saturating_sub(1) {
            m[(i, i + 1)] = betas[i];
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.values[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::from_row_major(self.rows, self.cols, values)
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::vecops::norm2(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Leading `rows x cols` block.
    pub fn leading(&self, rows: usize, cols: usize) -> DenseMatrix {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Applies the rotation to rows `i` and `j` from the left (`Gᵀ X`).
    pub fn rotate_rows(&mut self, rot: &GivensRotation) {
        let (i, j) = (rot.i, rot.j);
        for k in 0..self.cols {
            let (a, b) = rot.apply(self[(i, k)], self[(j, k)]);
            self[(i, k)] = a;
            self[(j, k)] = b;
        }
    }

    /// Applies the rotation to columns `i` and `j` from the right (`X G`).
    pub fn rotate_cols(&mut self, rot: &GivensRotation) {
        let (i, j) = (rot.i, rot.j);
        for k in 0..self.rows {
            let (a, b) = rot.apply(self[(k, i)], self[(k, j)]);
            self[(k, i)] = a;
            self[(k, j)] = b;
        }
    }

    pub fn negate_column(&mut self, j: usize) {
        for k in 0..self.rows {
            self[(k, j)] = -self[(k, j)];
        }
    }

    /// `max |XᵀX - I|` over the columns of `self`.
    pub fn orthogonality_defect(&self) -> f64 {
        self.transpose().matmul(self).sub(&Self::identity(self.cols)).max_abs()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.values[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.values[i * self.cols + j]
    }
}
