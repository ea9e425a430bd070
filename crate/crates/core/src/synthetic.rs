//! Matrices with a prescribed singular spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::SparseMatrix;
use crate::vecops::{dot, norm2};

/// Reflectors per orthogonal factor.
pub const REFLECTORS: usize = 4;

/// `A = U Σ Vᵀ` with `U`, `V` products of [`REFLECTORS`] seeded Householder
/// reflectors and `Σ = diag(sigma)` padded to `rows x cols`.
///
/// The result is stored densely in sparse form. Identical arguments give
/// bit-identical matrices.
///
/// # Panics
///
/// If `rows < cols`, `sigma.len() != cols` or some `sigma` is negative.
pub fn generate_test_matrix(rows: usize, cols: usize, sigma: &[f64], seed: u64) -> SparseMatrix {
    assert!(rows >= cols, "generator expects rows >= cols");
    assert_eq!(sigma.len(), cols, "one singular value per column");
    assert!(sigma.iter().all(|s| *s >= 0.0), "singular values must be non-negative");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left: Vec<Vec<f64>> = (0..REFLECTORS).map(|_| unit(rows, &mut rng)).collect();
    let right: Vec<Vec<f64>> = (0..REFLECTORS).map(|_| unit(cols, &mut rng)).collect();

    // columns of the dense matrix, starting from Σ
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut c = vec![0.0; rows];
            c[j] = sigma[j];
            c
        })
        .collect();
    for w in left.iter().rev() {
        for col in a.iter_mut() {
            reflect(w, col);
        }
    }
    // right factor: row ← row Vᵀ = (V rowᵀ)ᵀ with V = H_1 ⋯ H_r
    let mut row = vec![0.0; cols];
    for i in 0..rows {
        for (r, col) in row.iter_mut().zip(&a) {
            *r = col[i];
        }
        for w in right.iter().rev() {
            reflect(w, &mut row);
        }
        for (r, col) in row.iter().zip(a.iter_mut()) {
            col[i] = *r;
        }
    }

    let mut values = vec![0.0; rows * cols];
    for (j, col) in a.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            values[i * cols + j] = *v;
        }
    }
    SparseMatrix::from_dense(rows, cols, &values).expect("shape is consistent")
}

fn unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nv = norm2(&v);
        if nv > 1e-3 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// `x ← (I - 2wwᵀ) x` for unit `w`.
fn reflect(w: &[f64], x: &mut [f64]) {
    let s = 2.0 * dot(w, x);
    x.iter_mut().zip(w).for_each(|(xi, wi)| *xi -= s * wi);
}
