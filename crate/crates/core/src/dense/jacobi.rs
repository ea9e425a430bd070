//! One-sided (Hestenes) Jacobi SVD.
//!
//! Slow but simple and accurate; tests use it as the reference against which
//! the eigensolver, the bidiagonal QR step and the Krylov solver are checked.

use super::{DenseError, DenseMatrix};
use crate::vecops::{dot, norm2};

/// Thin SVD `D = U diag(values) Vᵀ` with `values` descending.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    pub u: DenseMatrix,
    pub values: Vec<f64>,
    pub v: DenseMatrix,
}

const MAX_SWEEPS: usize = 80;

pub fn jacobi_svd(d: &DenseMatrix) -> Result<JacobiSvd, DenseError> {
    if d.rows() < d.cols() {
        let t = jacobi_svd(&d.transpose())?;
        return Ok(JacobiSvd { u: t.v, values: t.values, v: t.u });
    }
    let (m, n) = (d.rows(), d.cols());
    // columns of the working matrix and of V
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| d.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut w, &mut v] {
                    let (left, right) = cols.split_at_mut(q);
                    for (a, b) in left[p].iter_mut().zip(right[0].iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = c * x - s * y;
                        *b = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DenseError::NoConvergence { routine: "jacobi_svd" });
    }

    let mut order: Vec<(usize, f64)> = w.iter().map(|c| norm2(c)).enumerate().collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let smax = order.first().map_or(0.0, |x| x.1);

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut vmat = DenseMatrix::zeros(n, n);
    for (dst, &(src, sigma)) in order.iter().enumerate() {
        values.push(sigma);
        for i in 0..n {
            vmat[(i, dst)] = v[src][i];
        }
        let col = if sigma > f64::EPSILON * smax * m as f64 && sigma > 0.0 {
            w[src].iter().map(|x| x / sigma).collect()
        } else {
            complete_basis(&u_cols, m)
        };
        u_cols.push(col);
    }
    let mut u = DenseMatrix::zeros(m, n);
    for (j, col) in u_cols.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = col[i];
        }
    }
    Ok(JacobiSvd { u, values, v: vmat })
}

/// A unit vector orthogonal to `basis`, built from the coordinate axes.
fn complete_basis(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best = vec![0.0; m];
    let mut best_norm = -1.0;
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        crate::vecops::orthogonalize_twice(basis, &mut e);
        let nrm = norm2(&e);
        if nrm > best_norm {
            best_norm = nrm;
            best = e;
        }
        if nrm > 0.5 {
            break;
        }
    }
    best.iter().map(|x| x / best_norm).collect()
}
