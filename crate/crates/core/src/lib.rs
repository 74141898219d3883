//! Sparse recovery with the l1-2 penalty `||x||_1 - ||x||_2`.
//!
//! The crate implements the full pipeline for studying l1-2 regularized
//! least squares,
//!
//! ```text
//!     min_x  0.5*||A*x - b||_2^2 + lambda*(||x||_1 - ||x||_2),
//! ```
//!
//! organized as:
//!
//! * [`core`] — shared domain types ([`SensingMatrix`], [`SparseSignal`],
//!   [`ProblemInstance`], [`SolverTrace`]), the objective, and recovery
//!   metrics;
//! * [`thresholding`] — pointwise/blockwise operators: soft thresholding,
//!   enlargement, the l1-2 thresholding operator, the exact proximal map of
//!   the l1-2 penalty, top-s truncation, and index-block machinery;
//! * [`solvers`] — the iterative schemes ITA, ITAT (truncated), ITAC
//!   (continuation), and the ISTA baseline;
//! * [`regularity`] — exact small-scale RIC/ROC/MIC/SEC constants,
//!   certification of the l1-2 restricted eigenvalue condition, sampled
//!   estimation, and the solver parameter schedules with their error bounds;
//! * [`problems`] — seeded generation of sensing matrices, sparse ground
//!   truths, and noisy observations, plus instance persistence;
//! * [`bench`] — reproducible experiment drivers (convergence traces,
//!   success-rate sweeps, parameter sweeps) with CSV output.
//!
//! All numerics are `f64`. Every randomized component is driven by explicit
//! seeds through a fixed, documented generator, so results are reproducible
//! across runs and platforms.

pub mod bench;
pub mod core;
pub mod problems;
pub mod regularity;
pub mod solvers;
pub mod thresholding;

pub use self::core::{
    objective_l12, relative_error, Error, IterationMetrics, MatrixKind, ProblemInstance, Result,
    SensingMatrix, SolverTrace, SparseSignal, Termination,
};
