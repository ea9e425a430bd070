//! Implicit restarting with harmonic shifts.
//!
//! `p` implicit-shift QR steps on `B_m` compress the factorization to
//! `k = m - p` steps whose starting vector is `∏ (AᵀA - μ_j² I) q₁` up to
//! normalization. The shifts are the unwanted harmonic Ritz values. A shift
//! that sits too close to a wanted value would damp that direction, so such
//! shifts are swapped for the approximation farthest from the target.

use rand::Rng;
use thiserror::Error;

use crate::bidiag::BidiagFactorization;
use crate::dense::{bidiag_qr_step, DenseMatrix};
use crate::harmonic::{Extraction, HarmonicApproximation};
use crate::vecops::{axpy, combine, norm2, orthogonalize_twice};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RestartError {
    #[error("{shifts} shifts cannot be applied to a {steps}-step factorization")]
    InvalidShiftCount { shifts: usize, steps: usize },
}

/// Shifts for one restart. Replacement values carry a flag so that a
/// second adaptation pass leaves them alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftSet {
    shifts: Vec<f64>,
    replaced: Vec<bool>,
}

impl ShiftSet {
    pub fn new(shifts: Vec<f64>) -> Self {
        assert!(shifts.iter().all(|s| *s >= 0.0), "shifts must be non-negative");
        let replaced = vec![false; shifts.len()];
        Self { shifts, replaced }
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn is_replaced(&self, i: usize) -> bool {
        self.replaced[i]
    }

    pub fn replaced_count(&self) -> usize {
        self.replaced.iter().filter(|r| **r).count()
    }
}

/// Takes the harmonic values ranked `k_eff + 1 ..= k_eff + p` as shifts.
///
/// A short tail is topped up with the largest `|θ|` of the negative pairs;
/// if even those run out fewer than `p` shifts are returned. With no
/// candidate at all the single shift `0` is returned.
pub fn select_shifts(extraction: &Extraction, k_eff: usize, p: usize) -> ShiftSet {
    let mut shifts: Vec<f64> = extraction
        .approximations
        .iter()
        .skip(k_eff)
        .take(p)
        .map(|a| a.theta)
        .collect();
    let deficit = p - shifts.len();
    shifts.extend(extraction.negative_thetas.iter().take(deficit).map(|t| t.abs()));
    if shifts.is_empty() {
        shifts.push(0.0);
    }
    ShiftSet::new(shifts)
}

/// `|((ρ - ε) - μ) / ρ|`
pub fn relgap(rho: f64, residual_estimate: f64, shift: f64) -> f64 {
    (((rho - residual_estimate) - shift) / rho).abs()
}

/// Replaces every shift within `threshold` relative gap of some wanted
/// approximation by `|ρ|` of the approximation in `all` farthest from `tau`.
/// Returns the number of shifts replaced by this call.
pub fn adapt_shifts(
    set: &mut ShiftSet,
    wanted: &[HarmonicApproximation],
    tau: f64,
    all: &[HarmonicApproximation],
    threshold: f64,
) -> usize {
    let Some(far) = all
        .iter()
        .max_by(|a, b| (a.rho - tau).abs().total_cmp(&(b.rho - tau).abs()))
    else {
        return 0;
    };
    let replacement = far.rho.abs();
    let mut count = 0;
    for (shift, flag) in set.shifts.iter_mut().zip(set.replaced.iter_mut()) {
        if *flag {
            continue;
        }
        let bad = wanted
            .iter()
            .any(|w| w.rho != 0.0 && relgap(w.rho, w.residual_estimate, *shift) <= threshold);
        if bad {
            *shift = replacement;
            *flag = true;
            count += 1;
        }
    }
    count
}

/// Applies the shifts and truncates `fact` to `m - p` steps.
pub fn implicit_restart<R: Rng + ?Sized>(
    fact: &mut BidiagFactorization,
    shifts: &ShiftSet,
    rng: &mut R,
) -> Result<(), RestartError> {
    let m = fact.steps();
    let p = shifts.len();
    if p == 0 || p >= m {
        return Err(RestartError::InvalidShiftCount { shifts: p, steps: m });
    }
    let k = m - p;
    let mut d = fact.alphas.clone();
    let mut e = fact.betas.clone();
    let mut pt = DenseMatrix::identity(m);
    let mut qt = DenseMatrix::identity(m);
    for &mu in shifts.shifts() {
        bidiag_qr_step(&mut d, &mut e, mu, &mut pt, &mut qt);
    }

    // keep the retained band non-negative
    for i in 0..k {
        if d[i] < 0.0 {
            d[i] = -d[i];
            if i + 1 < m {
                e[i] = -e[i];
            }
            pt.negate_column(i);
        }
        if i + 1 < k && e[i] < 0.0 {
            e[i] = -e[i];
            d[i + 1] = -d[i + 1];
            qt.negate_column(i + 1);
        }
    }

    let n_rows = fact.p[0].len();
    let n_cols = fact.q[0].len();
    let new_p: Vec<Vec<f64>> = (0..k).map(|j| combine(&fact.p, pt.column(j).into_iter(), n_rows)).collect();
    let mut new_q: Vec<Vec<f64>> = (0..=k).map(|j| combine(&fact.q, qt.column(j).into_iter(), n_cols)).collect();
    let q_follow = new_q.pop().expect("k + 1 columns");

    let mut r = vec![0.0; n_cols];
    axpy(fact.beta_residual * pt[(m - 1, k - 1)], &fact.q_next, &mut r);
    axpy(e[k - 1], &q_follow, &mut r);
    orthogonalize_twice(&new_q, &mut r);
    let beta = norm2(&r);

    d.truncate(k);
    e.truncate(k - 1);
    fact.p = new_p;
    fact.q = new_q;
    fact.alphas = d;
    fact.betas = e;
    fact.set_residual(r, beta, rng);
    Ok(())
}
