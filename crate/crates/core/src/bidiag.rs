//! Golub-Kahan-Lanczos bidiagonalization.
//!
//! After `j` steps the factorization satisfies
//!
//! ```text
//! A  Q_j = P_j B_j
//! Aᵀ P_j = Q_j B_jᵀ + β_j q_{j+1} e_jᵀ
//! ```
//!
//! with `B_j` upper bidiagonal. Only the right vectors `Q` are
//! reorthogonalized (two passes of classical Gram-Schmidt per step); the left
//! vectors inherit near-orthogonality from the recurrence.

use rand::Rng;
use thiserror::Error;

use crate::dense::DenseMatrix;
use crate::sparse::{MatvecCounter, SparseError, SparseMatrix};
use crate::vecops::{axpy, dot, norm2, orthogonalize_twice, scale};

/// Relative size (against `‖A‖₁`) below which `α` or `β` counts as a breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BidiagError {
    #[error("starting vector has norm {norm}, expected 1")]
    NotUnit { norm: f64 },
    #[error("starting vector lies in the null space of A")]
    NullStart,
    #[error("cannot take {requested} steps on a {rows}x{cols} matrix")]
    TooManySteps { requested: usize, rows: usize, cols: usize },
    #[error("factorization spans the whole column space and cannot be extended")]
    Exhausted,
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

#[derive(Debug, Clone)]
pub struct BidiagFactorization {
    pub(crate) p: Vec<Vec<f64>>,
    pub(crate) q: Vec<Vec<f64>>,
    pub(crate) alphas: Vec<f64>,
    pub(crate) betas: Vec<f64>,
    pub(crate) beta_residual: f64,
    pub(crate) q_next: Vec<f64>,
    pub(crate) exhausted: bool,
    pub(crate) a_norm: f64,
    pub(crate) breakdowns: usize,
}

impl BidiagFactorization {
    /// First step from the unit vector `q1`.
    pub fn start<R: Rng + ?Sized>(
        a: &SparseMatrix,
        q1: &[f64],
        counter: &mut MatvecCounter,
        rng: &mut R,
    ) -> Result<Self, BidiagError> {
        let norm = norm2(q1);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(BidiagError::NotUnit { norm });
        }
        let a_norm = a.one_norm();
        let mut p = a.matvec(q1, counter)?;
        let alpha = norm2(&p);
        if a_norm == 0.0 || alpha <= BREAKDOWN_TOL * a_norm {
            return Err(BidiagError::NullStart);
        }
        scale(1.0 / alpha, &mut p);
        let mut fact = Self {
            p: vec![p],
            q: vec![q1.to_vec()],
            alphas: vec![alpha],
            betas: Vec::new(),
            beta_residual: 0.0,
            q_next: vec![0.0; a.cols()],
            exhausted: false,
            a_norm,
            breakdowns: 0,
        };
        fact.close_step(a, rng)?;
        Ok(fact)
    }

    /// Runs the recurrence until the factorization has `target_steps` steps.
    pub fn extend<R: Rng + ?Sized>(
        &mut self,
        a: &SparseMatrix,
        target_steps: usize,
        counter: &mut MatvecCounter,
        rng: &mut R,
    ) -> Result<(), BidiagError> {
        if target_steps > a.rows().min(a.cols()) {
            return Err(BidiagError::TooManySteps {
                requested: target_steps,
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        while self.steps() < target_steps {
            if self.exhausted {
                return Err(BidiagError::Exhausted);
            }
            let qj = std::mem::take(&mut self.q_next);
            let mut p = a.matvec(&qj, counter)?;
            axpy(-self.beta_residual, self.p.last().expect("non-empty"), &mut p);
            let mut alpha = norm2(&p);
            if alpha <= BREAKDOWN_TOL * self.a_norm {
                // invariant subspace on the left: continue with a fresh direction
                alpha = 0.0;
                p = random_orthogonal_unit(&self.p, a.rows(), rng).ok_or(BidiagError::Exhausted)?;
                self.breakdowns += 1;
            } else {
                scale(1.0 / alpha, &mut p);
            }
            self.betas.push(self.beta_residual);
            self.alphas.push(alpha);
            self.p.push(p);
            self.q.push(qj);
            self.close_step(a, rng)?;
        }
        Ok(())
    }

    /// Computes `β_j q_{j+1} = Aᵀ p_j - α_j q_j`, reorthogonalized against `Q`.
    fn close_step<R: Rng + ?Sized>(&mut self, a: &SparseMatrix, rng: &mut R) -> Result<(), BidiagError> {
        let pj = self.p.last().expect("non-empty");
        let qj = self.q.last().expect("non-empty");
        let alpha = *self.alphas.last().expect("non-empty");
        let mut r = a.matvec_transpose(pj)?;
        axpy(-alpha, qj, &mut r);
        orthogonalize_twice(&self.q, &mut r);
        let beta = norm2(&r);
        self.set_residual(r, beta, rng);
        Ok(())
    }

    /// Installs `r = β q_next`, substituting a random direction on breakdown.
    pub(crate) fn set_residual<R: Rng + ?Sized>(&mut self, mut r: Vec<f64>, beta: f64, rng: &mut R) {
        if beta <= BREAKDOWN_TOL * self.a_norm {
            self.beta_residual = 0.0;
            self.breakdowns += 1;
            match random_orthogonal_unit(&self.q, r.len(), rng) {
                Some(v) => {
                    self.q_next = v;
                    self.exhausted = false;
                }
                None => {
                    self.q_next = vec![0.0; r.len()];
                    self.exhausted = true;
                }
            }
        } else {
            scale(1.0 / beta, &mut r);
            self.beta_residual = beta;
            self.q_next = r;
            self.exhausted = false;
        }
    }

    pub fn steps(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Superdiagonal `β_1 .. β_{j-1}` of `B_j`.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `β_j`, the norm of the residual column.
    pub fn beta_residual(&self) -> f64 {
        self.beta_residual
    }

    pub fn q_next(&self) -> &[f64] {
        &self.q_next
    }

    /// Left Lanczos vectors `p_1 .. p_j`.
    pub fn left_vectors(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Right Lanczos vectors `q_1 .. q_j`.
    pub fn right_vectors(&self) -> &[Vec<f64>] {
        &self.q
    }

    /// True once `Q` spans the whole column space and no `q_{j+1}` exists.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Number of breakdowns replaced by random directions so far.
    pub fn breakdowns(&self) -> usize {
        self.breakdowns
    }

    /// `‖A‖₁` of the matrix the factorization was started on.
    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn b_matrix(&self) -> DenseMatrix {
        DenseMatrix::upper_bidiagonal(&self.alphas, &self.betas)
    }

    /// Explicitly measures how well the factorization identities hold.
    ///
    /// Spends `j` uncounted products with `A`; meant for tests and diagnostics.
    pub fn residuals(&self, a: &SparseMatrix) -> FactorizationResiduals {
        let j = self.steps();
        let mut scratch = MatvecCounter::new();
        let mut left = 0.0_f64;
        let mut right = 0.0_f64;
        for i in 0..j {
            let mut col = a.matvec(&self.q[i], &mut scratch).expect("shape checked at start");
            axpy(-self.alphas[i], &self.p[i], &mut col);
            if i > 0 {
                axpy(-self.betas[i - 1], &self.p[i - 1], &mut col);
            }
            left = left.max(norm2(&col));

            let mut col = a.matvec_transpose(&self.p[i]).expect("shape checked at start");
            axpy(-self.alphas[i], &self.q[i], &mut col);
            if i + 1 < j {
                axpy(-self.betas[i], &self.q[i + 1], &mut col);
            } else {
                axpy(-self.beta_residual, &self.q_next, &mut col);
            }
            right = right.max(norm2(&col));
        }
        let mut q_orth = 0.0_f64;
        for i in 0..j {
            for k in 0..=i {
                let target = if i == k { 1.0 } else { 0.0 };
                q_orth = q_orth.max((dot(&self.q[i], &self.q[k]) - target).abs());
            }
        }
        let next_orth = if self.exhausted {
            0.0
        } else {
            self.q.iter().map(|q| dot(q, &self.q_next).abs()).fold(0.0, f64::max)
        };
        FactorizationResiduals {
            left,
            right,
            q_orthogonality: q_orth,
            q_next_orthogonality: next_orth,
        }
    }
}

/// Column-wise maxima of the factorization defects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationResiduals {
    /// `max_i ‖(A Q - P B) e_i‖`
    pub left: f64,
    /// `max_i ‖(Aᵀ P - Q Bᵀ - β q_{j+1} e_jᵀ) e_i‖`
    pub right: f64,
    /// `max |QᵀQ - I|`
    pub q_orthogonality: f64,
    /// `max |Qᵀ q_{j+1}|`
    pub q_next_orthogonality: f64,
}

/// Random unit vector orthogonal to `basis`, or `None` if `basis` already spans
/// the space.
pub(crate) fn random_orthogonal_unit<R: Rng + ?Sized>(basis: &[Vec<f64>], len: usize, rng: &mut R) -> Option<Vec<f64>> {
    if basis.len() >= len {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let before = orthogonalize_twice(basis, &mut v);
        let after = norm2(&v);
        if after > 1e-6 * before && after > 0.0 {
            scale(1.0 / after, &mut v);
            return Some(v);
        }
    }
    None
}
