use super::{DenseError, DenseMatrix};

/// Lower-triangular `L` with `L Lᵀ = S`.
///
/// A pivot at or below `n * eps * max(diag S)` is reported as
/// [`DenseError::NotPositiveDefinite`].
pub fn cholesky(s: &DenseMatrix) -> Result<DenseMatrix, DenseError> {
    let n = s.rows();
    if s.cols() != n {
        return Err(DenseError::NotSquare { rows: n, cols: s.cols() });
    }
    let max_diag = (0..n).map(|i| s[(i, i)]).fold(0.0, f64::max);
    let floor = n as f64 * f64::EPSILON * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= floor {
            return Err(DenseError::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub(crate) fn forward_solve(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in 0..n {
        let mut v = x[i];
        for k in 0..i {
            v -= l[(i, k)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub(crate) fn backward_solve_transposed(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut v = x[i];
        for k in (i + 1)..n {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}
