//! Interior singular triplets of sparse matrices.
//!
//! [`solve`] computes the `k` singular triplets of a sparse `A` whose singular
//! values are nearest a target `τ`, using implicitly restarted Lanczos
//! bidiagonalization with harmonic Ritz extraction.
//!
//! ```
//! use interior_svd::{solve, SolverConfig, SparseMatrix};
//!
//! let diag: Vec<_> = (0..10).map(|i| (i, i, (i + 1) as f64)).collect();
//! let a = SparseMatrix::from_triplets(10, 10, &diag)?;
//! let result = solve(&a, &SolverConfig::new(4.4, 1, 8))?;
//! assert!((result.triplets[0].sigma - 4.0).abs() < 1e-8);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The building blocks are public for experimentation:
//!
//! - [`sparse`]: storage, counted products and Matrix Market I/O
//! - [`dense`]: small dense kernels for the projected problems
//! - [`bidiag`]: the Lanczos bidiagonalization
//! - [`harmonic`]: the harmonic pencil and extraction
//! - [`restart`]: shift selection and implicit restarting
//! - [`driver`]: the solver loop
//! - [`synthetic`]: test matrices with a prescribed spectrum

pub mod bidiag;
pub mod dense;
pub mod driver;
pub mod harmonic;
pub mod restart;
pub mod sparse;
pub mod synthetic;
pub(crate) mod vecops;

pub use driver::{solve, RunStats, SingularTriplet, SolverConfig, SolverError, SolverResult};
pub use sparse::SparseMatrix;

// The guide's snippets run as doctests.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/intro.md")]
mod book_intro {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sparse.md")]
mod book_sparse {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/bidiagonalization.md")]
mod book_bidiagonalization {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/harmonic.md")]
mod book_harmonic {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/restarting.md")]
mod book_restarting {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/driver.md")]
mod book_driver {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
