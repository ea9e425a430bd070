use super::{DenseMatrix, GivensRotation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BidiagQrOutcome {
    Applied,
    /// Fewer than two rows; nothing to chase.
    TooSmall,
}

/// One implicit-shift Golub-Kahan QR step on the upper bidiagonal `B`.
///
/// Performs the step for `BᵀB - shift² I` by chasing a bulge down the band.
/// Right rotations are accumulated into the columns of `q_acc`, left
/// rotations into the columns of `p_acc`, so that on exit
/// `B_new = p_stepᵀ B q_step` for the rotation products of this step.
pub fn bidiag_qr_step(
    alphas: &mut [f64],
    betas: &mut [f64],
    shift: f64,
    p_acc: &mut DenseMatrix,
    q_acc: &mut DenseMatrix,
) -> BidiagQrOutcome {
    let n = alphas.len();
    if n < 2 {
        return BidiagQrOutcome::TooSmall;
    }
    assert!(betas.len() + 1 >= n, "superdiagonal too short");
    let (d, e) = (alphas, betas);

    let mut y = (d[0] - shift) * (d[0] + shift);
    let mut z = d[0] * e[0];
    for k in 0..n - 1 {
        // right rotation on columns k, k+1
        let (rot, r) = GivensRotation::annihilating(y, z, k, k + 1);
        if k > 0 {
            e[k - 1] = r;
        }
        let (dk, ek) = rot.apply(d[k], e[k]);
        let (bulge, dk1) = rot.apply(0.0, d[k + 1]);
        d[k] = dk;
        e[k] = ek;
        d[k + 1] = dk1;
        q_acc.rotate_cols(&rot);

        // left rotation on rows k, k+1 removes the subdiagonal bulge
        let (rot, r) = GivensRotation::annihilating(d[k], bulge, k, k + 1);
        d[k] = r;
        let (ek, dk1) = rot.apply(e[k], d[k + 1]);
        e[k] = ek;
        d[k + 1] = dk1;
        if k + 2 < n {
            let (b2, ek1) = rot.apply(0.0, e[k + 1]);
            e[k + 1] = ek1;
            y = e[k];
            z = b2;
        }
        p_acc.rotate_cols(&rot);
    }
    BidiagQrOutcome::Applied
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::jacobi_svd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bidiag(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let e = (0..n - 1).map(|_| rng.random_range(0.1..2.0)).collect();
        (d, e)
    }

    #[test]
    fn too_small() {
        let mut p = DenseMatrix::identity(1);
        let mut q = DenseMatrix::identity(1);
        assert_eq!(bidiag_qr_step(&mut [2.0], &mut [], 0.5, &mut p, &mut q), BidiagQrOutcome::TooSmall);
    }

    #[test]
    fn already_deflated_zero_shift() {
        let (mut d, mut e) = (vec![1.0, 2.0], vec![0.0]);
        let mut p = DenseMatrix::identity(2);
        let mut q = DenseMatrix::identity(2);
        bidiag_qr_step(&mut d, &mut e, 0.0, &mut p, &mut q);
        assert_eq!(d.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1.0, 2.0]);
        assert_eq!(e[0], 0.0);
        for m in [&p, &q] {
            assert_eq!(m[(0, 1)], 0.0);
            assert_eq!(m[(1, 0)], 0.0);
            assert_eq!(m[(0, 0)].abs(), 1.0);
            assert_eq!(m[(1, 1)].abs(), 1.0);
        }
    }

    #[test]
    fn perfect_shift_deflates() {
        let (mut d, mut e) = (vec![1.0, 0.7, 2.0], vec![0.5, 1.1]);
        let b = DenseMatrix::upper_bidiagonal(&d, &e);
        let svd = jacobi_svd(&b).unwrap();
        let mut p = DenseMatrix::identity(3);
        let mut q = DenseMatrix::identity(3);
        bidiag_qr_step(&mut d, &mut e, svd.values[1], &mut p, &mut q);
        assert!(e[1].abs() <= 1e-10 * b.frobenius_norm(), "e = {e:?}");
        assert!((d[2].abs() - svd.values[1]).abs() < 1e-10);
    }

    #[test]
    fn random_step_is_orthogonal_equivalence() {
        let n = 6;
        let (mut d, mut e) = random_bidiag(n, 3);
        let b = DenseMatrix::upper_bidiagonal(&d, &e);
        let before = jacobi_svd(&b).unwrap().values;
        let mut p = DenseMatrix::identity(n);
        let mut q = DenseMatrix::identity(n);
        bidiag_qr_step(&mut d, &mut e, 0.83, &mut p, &mut q);
        let b_new = DenseMatrix::upper_bidiagonal(&d, &e);
        assert!((b_new.frobenius_norm() / b.frobenius_norm() - 1.0).abs() < 1e-13);
        let explicit = p.transpose().matmul(&b).matmul(&q);
        assert!(explicit.sub(&b_new).max_abs() <= 1e-12 * b.frobenius_norm());
        let after = jacobi_svd(&b_new).unwrap().values;
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() <= 1e-12 * x);
        }
        assert!(p.orthogonality_defect() <= 100.0 * n as f64 * f64::EPSILON);
        assert!(q.orthogonality_defect() <= 100.0 * n as f64 * f64::EPSILON);
    }

    #[test]
    fn first_column_of_q_follows_shifted_gram_matrix() {
        let n = 5;
        let (mut d, mut e) = random_bidiag(n, 8);
        let b = DenseMatrix::upper_bidiagonal(&d, &e);
        let mu = 0.4;
        let btb = b.transpose().matmul(&b);
        let mut target = btb.column(0);
        target[0] -= mu * mu;
        let mut p = DenseMatrix::identity(n);
        let mut q = DenseMatrix::identity(n);
        bidiag_qr_step(&mut d, &mut e, mu, &mut p, &mut q);
        let q0 = q.column(0);
        let nt = crate::vecops::norm2(&target);
        let cos = crate::vecops::dot(&q0, &target).abs() / nt;
        assert!((cos - 1.0).abs() < 1e-13);
    }
}
