//! Small dense vector helpers shared by the Krylov code.

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * ssq.sqrt()
}

/// `y += a * x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale(a: f64, x: &mut [f64]) {
    for v in x {
        *v *= a;
    }
}

/// Two passes of classical Gram-Schmidt of `r` against the columns in `basis`.
///
/// Returns the norm of `r` before the first pass, used by callers to judge
/// cancellation.
pub fn orthogonalize_twice(basis: &[Vec<f64>], r: &mut [f64]) -> f64 {
    let before = norm2(r);
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|b| dot(b, r)).collect();
        for (b, c) in basis.iter().zip(&coeffs) {
            axpy(-c, b, r);
        }
    }
    before
}

/// Linear combination `sum_i coeffs[i] * columns[i]`.
pub fn combine(columns: &[Vec<f64>], coeffs: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (col, c) in columns.iter().zip(coeffs) {
        if c != 0.0 {
            axpy(c, col, &mut out);
        }
    }
    out
}
