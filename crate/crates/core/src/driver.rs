//! The restarted solver loop.
//!
//! Each cycle extends the factorization to `m` steps, extracts the
//! `k + extras` harmonic approximations nearest `τ`, tests the `k` wanted ones
//! and otherwise restarts down to `k + extras` steps with the remaining
//! harmonic values as shifts.
//!
//! Convergence is accepted in two stages. The cheap estimates `ε̂` must all
//! fall below `tol·‖A‖₁`; only then are the vectors formed and the true
//! residuals measured, and `stopcrit / ‖A‖₁ < tol` decides.

use std::borrow::Cow;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bidiag::{BidiagError, BidiagFactorization};
use crate::harmonic::{extract_all, form_vectors, EstimateKind, Extraction, HarmonicApproximation, HarmonicError};
use crate::restart::{adapt_shifts, implicit_restart, select_shifts, RestartError};
use crate::sparse::{MatvecCounter, SparseMatrix};
use crate::vecops::{axpy, norm2};

/// Consecutive empty extractions tolerated before giving up.
pub const MAX_EMPTY_EXTRACTIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Target; `0` asks for the smallest singular values.
    pub tau: f64,
    pub k: usize,
    /// Largest subspace dimension. Clamped to `min(rows, cols)`.
    pub m: usize,
    /// Relative tolerance on `stopcrit / ‖A‖₁`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Approximations kept beyond `k` at each restart.
    pub extras: usize,
    pub relgap_threshold: f64,
    /// Debug switch for the value used inside `ε̂`.
    pub estimate: EstimateKind,
    pub verbose: bool,
}

impl SolverConfig {
    pub fn new(tau: f64, k: usize, m: usize) -> Self {
        Self {
            tau,
            k,
            m,
            ..Self::default()
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 0.0,
            k: 1,
            m: 20,
            tol: 1e-6,
            max_restarts: 2000,
            seed: 0,
            extras: 3,
            relgap_threshold: 1e-3,
            estimate: EstimateKind::RayleighQuotient,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `sqrt(‖Av - σu‖² + ‖Aᵀu - σv‖²)`
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub restarts: usize,
    /// Products with `A`, including those spent verifying residuals.
    pub matvecs: usize,
    /// The part of `matvecs` spent on true-residual checks.
    pub verification_matvecs: usize,
    pub wall_seconds: f64,
    /// Largest true residual among the returned triplets.
    pub stopcrit: f64,
    pub breakdown_events: usize,
    pub shifts_replaced: usize,
    /// `ε̂` of the wanted approximations, one row per cycle.
    pub residual_history: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    /// Sorted by `|σ - τ|`.
    pub triplets: Vec<SingularTriplet>,
    pub stats: RunStats,
    pub converged: bool,
    /// `‖A‖₁`
    pub a_norm: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot compute {k} triplets of a {rows}x{cols} matrix")]
    InvalidRequest { k: usize, rows: usize, cols: usize },
    #[error("the matrix is zero")]
    ZeroMatrix,
    #[error("no positive harmonic Ritz value in {0} consecutive cycles")]
    ExtractionFailed(usize),
    #[error(transparent)]
    Bidiag(#[from] BidiagError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Restart(#[from] RestartError),
}

/// Subspace sizes after validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plan {
    pub m: usize,
    pub k_eff: usize,
}

/// Checks `config` against the shape of `a` and settles the subspace sizes.
///
/// `m` is clamped to `min(rows, cols)`. When the whole space fits, the
/// extras shrink so that one shift remains.
pub fn plan(rows: usize, cols: usize, config: &SolverConfig) -> Result<Plan, SolverError> {
    let invalid = |msg: String| Err(SolverError::InvalidConfig(msg));
    if !config.tau.is_finite() || config.tau < 0.0 {
        return invalid(format!("target must be finite and non-negative, got {}", config.tau));
    }
    if config.k == 0 {
        return invalid("k must be at least 1".into());
    }
    if config.tol.is_nan() || config.tol <= 0.0 {
        return invalid(format!("tolerance must be positive, got {}", config.tol));
    }
    if config.relgap_threshold.is_nan() || config.relgap_threshold < 0.0 {
        return invalid(format!("relgap threshold must be non-negative, got {}", config.relgap_threshold));
    }
    let n_min = rows.min(cols);
    if config.k >= n_min {
        return Err(SolverError::InvalidRequest { k: config.k, rows, cols });
    }
    let m = config.m.min(n_min);
    if m < config.k + 1 {
        return invalid(format!("m = {} leaves no room for a shift with k = {}", config.m, config.k));
    }
    let mut extras = config.extras;
    if m < config.k + extras + 1 {
        if m == n_min {
            extras = m - config.k - 1;
        } else {
            return invalid(format!(
                "m = {} must be at least k + extras + 1 = {}",
                config.m,
                config.k + extras + 1
            ));
        }
    }
    Ok(Plan { m, k_eff: config.k + extras })
}

/// Computes the `config.k` singular triplets of `a` nearest `config.tau`.
pub fn solve(a: &SparseMatrix, config: &SolverConfig) -> Result<SolverResult, SolverError> {
    let start = Instant::now();
    let plan = plan(a.rows(), a.cols(), config)?;
    let transposed = a.rows() < a.cols();
    let work: Cow<'_, SparseMatrix> = if transposed { Cow::Owned(a.transpose()) } else { Cow::Borrowed(a) };
    let a_norm = work.one_norm();
    if a_norm == 0.0 {
        return Err(SolverError::ZeroMatrix);
    }
    let (tau, k) = (config.tau, config.k);
    let tol_abs = config.tol * a_norm;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut counter = MatvecCounter::new();
    let mut q1: Vec<f64> = (0..work.cols()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let n1 = norm2(&q1);
    q1.iter_mut().for_each(|x| *x /= n1);
    let mut fact = BidiagFactorization::start(&work, &q1, &mut counter, &mut rng)?;

    let mut stats = RunStats::default();
    let mut verification = 0usize;
    let mut empty_runs = 0usize;
    let (mut triplets, converged) = loop {
        fact.extend(&work, plan.m, &mut counter, &mut rng)?;
        let ex = match extract_all(&fact, tau, config.estimate) {
            Ok(ex) => ex,
            Err(HarmonicError::PencilDegenerate) => Extraction::default(),
            Err(e) => return Err(e.into()),
        };
        if ex.approximations.is_empty() {
            empty_runs += 1;
            if empty_runs >= MAX_EMPTY_EXTRACTIONS {
                return Err(SolverError::ExtractionFailed(empty_runs));
            }
        } else {
            empty_runs = 0;
        }
        let wanted = &ex.approximations[..k.min(ex.approximations.len())];
        stats
            .residual_history
            .push(wanted.iter().map(|w| w.residual_estimate).collect());
        if config.verbose {
            log::info!(
                "cycle {}: rho = {:?}, eps = {:?}",
                stats.restarts,
                wanted.iter().map(|w| w.rho).collect::<Vec<_>>(),
                stats.residual_history.last().expect("just pushed")
            );
        }

        let cheap_pass = wanted.len() == k && wanted.iter().all(|w| w.residual_estimate < tol_abs);
        if cheap_pass || stats.restarts >= config.max_restarts {
            let triplets = verify(&work, &fact, wanted, &mut counter, &mut verification);
            let stopcrit = triplets.iter().fold(0.0_f64, |acc, t| acc.max(t.residual));
            stats.stopcrit = stopcrit;
            if cheap_pass && stopcrit / a_norm < config.tol {
                break (triplets, true);
            }
            if stats.restarts >= config.max_restarts {
                break (triplets, false);
            }
            log::debug!("cheap test passed but stopcrit/‖A‖₁ = {:e}", stopcrit / a_norm);
        }

        let p = plan.m - plan.k_eff;
        let mut shifts = select_shifts(&ex, plan.k_eff, p);
        stats.shifts_replaced += adapt_shifts(&mut shifts, wanted, tau, &ex.approximations, config.relgap_threshold);
        implicit_restart(&mut fact, &shifts, &mut rng)?;
        stats.restarts += 1;
    };
    triplets.sort_by(|a, b| (a.sigma - tau).abs().total_cmp(&(b.sigma - tau).abs()));
    if transposed {
        for t in &mut triplets {
            std::mem::swap(&mut t.u, &mut t.v);
        }
    }
    stats.matvecs = usize::try_from(counter.count()).expect("count fits in usize");
    stats.verification_matvecs = verification;
    stats.breakdown_events = fact.breakdowns();
    stats.wall_seconds = start.elapsed().as_secs_f64();
    Ok(SolverResult {
        triplets,
        stats,
        converged,
        a_norm,
    })
}

/// Forms the vectors and measures true residuals; one counted product each.
fn verify(
    a: &SparseMatrix,
    fact: &BidiagFactorization,
    wanted: &[HarmonicApproximation],
    counter: &mut MatvecCounter,
    verification: &mut usize,
) -> Vec<SingularTriplet> {
    wanted
        .iter()
        .map(|w| {
            let (u, v) = form_vectors(fact, w);
            let sigma = w.rho;
            let mut left = a.matvec(&v, counter).expect("shape fixed by the factorization");
            *verification += 1;
            axpy(-sigma, &u, &mut left);
            let mut right = a.matvec_transpose(&u).expect("shape fixed by the factorization");
            axpy(-sigma, &v, &mut right);
            let residual = norm2(&left).hypot(norm2(&right));
            SingularTriplet { sigma, u, v, residual }
        })
        .collect()
}
