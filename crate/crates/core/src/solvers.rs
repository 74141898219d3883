//! Iterative solvers for the l1-2 regularized least-squares problem.
//!
//! All four schemes share one skeleton — a gradient step on the smooth part
//! followed by a thresholding operator scaled by `v*lambda`:
//!
//! * ITA applies the l1-2 thresholding operator;
//! * ITAT additionally truncates each iterate to its `s` largest entries;
//! * ITAC applies the l1-2 operator under a geometrically decreasing
//!   regularization parameter (continuation) and stops once the parameter
//!   drops below the target;
//! * ISTA (the baseline) applies plain soft thresholding.
//!
//! Stopping: the fixed-parameter solvers stop once the relative change
//! `||x_k - x_{k-1}||/||x_{k-1}||` falls to `rel_tol` (the test is skipped
//! while the previous iterate is zero) or at `max_iter`. ITAC stops only by
//! the continuation rule or the `max_iter` safety cap.
//!
//! Trace conventions: the metrics list holds the initial point plus one row
//! per iteration. The objective column reports the l1-2 objective at the
//! caller's target `lambda` for every solver — including ITAC, whose active
//! parameter (recorded in its own column) varies, and the ISTA baseline —
//! so curves are comparable across solvers. Each solve is single-threaded,
//! deterministic, and pure: identical inputs give bit-identical traces.

use nalgebra::DVector;

use crate::core::{
    l12_penalty, Error, IterationMetrics, ProblemInstance, Result, SensingMatrix, SolverTrace,
    SparseSignal, Termination,
};
use crate::thresholding::{l12_threshold, soft_threshold, truncate_top_s};

/// How much per-iterate state a trace retains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceLevel {
    /// Keep scalar metrics only (the default).
    #[default]
    MetricsOnly,
    /// Additionally keep every iterate, including the initial point.
    FullIterates,
}

/// Shared solver configuration.
///
/// `trunc_s` applies to ITAT only; `lambda0` and `gamma` to ITAC only. The
/// defaults (`v = 0.5`, `x0 = 0`, `max_iter = 500`, `rel_tol = 1e-6`) are
/// the standard experiment protocol.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target regularization parameter. Nonnegative; ITAC requires it
    /// positive (its stopping rule compares against it).
    pub lambda: f64,
    /// Gradient step size, positive.
    pub v: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Truncation sparsity for ITAT (at least 1).
    pub trunc_s: Option<usize>,
    /// Continuation start for ITAC.
    pub lambda0: Option<f64>,
    /// Continuation decay factor for ITAC, in (0, 1).
    pub gamma: Option<f64>,
    /// Initial point; zero when absent.
    pub x0: Option<DVector<f64>>,
    pub trace_level: TraceLevel,
}

impl SolverConfig {
    pub const DEFAULT_STEP: f64 = 0.5;
    pub const DEFAULT_MAX_ITER: usize = 500;
    pub const DEFAULT_REL_TOL: f64 = 1e-6;

    pub fn new(lambda: f64) -> Self {
        SolverConfig {
            lambda,
            v: Self::DEFAULT_STEP,
            max_iter: Self::DEFAULT_MAX_ITER,
            rel_tol: Self::DEFAULT_REL_TOL,
            trunc_s: None,
            lambda0: None,
            gamma: None,
            x0: None,
            trace_level: TraceLevel::default(),
        }
    }

    fn validate_common(&self, n: usize) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Domain("lambda must be finite and nonnegative".into()));
        }
        if !self.v.is_finite() || self.v <= 0.0 {
            return Err(Error::Domain("step size v must be finite and positive".into()));
        }
        if !self.rel_tol.is_finite() || self.rel_tol < 0.0 {
            return Err(Error::Domain("rel_tol must be finite and nonnegative".into()));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != n {
                return Err(Error::Shape(format!(
                    "initial point has length {} but the problem has {n} unknowns",
                    x0.len()
                )));
            }
            crate::core::ensure_finite(x0, "initial point")?;
        }
        Ok(())
    }

    fn initial_point(&self, n: usize) -> DVector<f64> {
        self.x0.clone().unwrap_or_else(|| DVector::zeros(n))
    }
}

/// Names a solver; used by the benchmark harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SolverKind {
    Ista,
    Ita,
    Itat,
    Itac,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Ista => "ista",
            SolverKind::Ita => "ita",
            SolverKind::Itat => "itat",
            SolverKind::Itac => "itac",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ista" => Some(SolverKind::Ista),
            "ita" => Some(SolverKind::Ita),
            "itat" => Some(SolverKind::Itat),
            "itac" => Some(SolverKind::Itac),
            _ => None,
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One gradient step on the smooth part: `x - v*A^T*(A*x - b)`.
pub fn gradient_step(
    a: &SensingMatrix,
    b: &DVector<f64>,
    x: &DVector<f64>,
    v: f64,
) -> Result<DVector<f64>> {
    if b.len() != a.m() {
        return Err(Error::Shape(format!(
            "observation has length {} but the matrix has {} rows",
            b.len(),
            a.m()
        )));
    }
    if x.len() != a.n() {
        return Err(Error::Shape(format!(
            "point has length {} but the matrix has {} columns",
            x.len(),
            a.n()
        )));
    }
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Domain("step size v must be finite and positive".into()));
    }
    crate::core::ensure_finite(b, "observation")?;
    crate::core::ensure_finite(x, "point")?;
    let r = a.matrix() * x - b;
    Ok(x - a.matrix().tr_mul(&r) * v)
}

fn record(
    x: &DVector<f64>,
    residual_norm: f64,
    target_lambda: f64,
    active_lambda: f64,
    truth: &SparseSignal,
    truth_norm: f64,
) -> IterationMetrics {
    IterationMetrics {
        objective: 0.5 * residual_norm * residual_norm + target_lambda * l12_penalty(x),
        residual_norm,
        relative_error: (truth_norm > 0.0)
            .then(|| (x - truth.values()).norm() / truth_norm),
        lambda: active_lambda,
    }
}

fn check_finite_iter(v: &DVector<f64>, iteration: usize, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence {
            iteration,
            detail: format!("{what} contains a non-finite component"),
        })
    }
}

/// Shared loop for the fixed-parameter solvers (ITA, ITAT, ISTA).
fn run_fixed<F>(instance: &ProblemInstance, cfg: &SolverConfig, apply: F) -> Result<SolverTrace>
where
    F: Fn(&DVector<f64>, f64) -> Result<DVector<f64>>,
{
    let a = instance.matrix().matrix();
    let b = instance.observation();
    let truth = instance.truth();
    let truth_norm = truth.norm();
    let threshold = cfg.v * cfg.lambda;

    let mut x = cfg.initial_point(instance.matrix().n());
    let mut r = a * &x - b;
    let mut metrics = vec![record(&x, r.norm(), cfg.lambda, cfg.lambda, truth, truth_norm)];
    let mut iterates = matches!(cfg.trace_level, TraceLevel::FullIterates).then(|| vec![x.clone()]);
    let mut terminated_by = Termination::MaxIter;
    let mut iterations_used = 0;

    for k in 1..=cfg.max_iter {
        let y = &x - a.tr_mul(&r) * cfg.v;
        check_finite_iter(&y, k, "the gradient step")?;
        let x_next = apply(&y, threshold)?;
        let r_next = a * &x_next - b;
        check_finite_iter(&r_next, k, "the residual")?;
        metrics.push(record(&x_next, r_next.norm(), cfg.lambda, cfg.lambda, truth, truth_norm));
        if let Some(list) = &mut iterates {
            list.push(x_next.clone());
        }
        iterations_used = k;
        let step = (&x_next - &x).norm();
        let denom = x.norm();
        x = x_next;
        r = r_next;
        if denom > 0.0 && step / denom <= cfg.rel_tol {
            terminated_by = Termination::Tolerance;
            break;
        }
    }

    Ok(SolverTrace { solution: x, iterates, metrics, iterations_used, terminated_by })
}

/// The l1-2 iterative thresholding algorithm:
/// `x_{k+1} = T_{v*lambda}(x_k - v*A^T*(A*x_k - b))`.
pub fn ita_solve(instance: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverTrace> {
    cfg.validate_common(instance.matrix().n())?;
    run_fixed(instance, cfg, |y, thr| l12_threshold(y, thr))
}

/// ITA with truncation: each iterate keeps only its `trunc_s` largest
/// entries, so every iterate after the initial point has at most `trunc_s`
/// nonzeros.
pub fn itat_solve(instance: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverTrace> {
    let n = instance.matrix().n();
    cfg.validate_common(n)?;
    let s = cfg
        .trunc_s
        .ok_or_else(|| Error::Domain("itat requires the truncation sparsity trunc_s".into()))?;
    if s == 0 {
        return Err(Error::Domain("truncation sparsity must be at least 1".into()));
    }
    if s > n {
        return Err(Error::Domain(format!(
            "truncation sparsity {s} exceeds the {n} unknowns"
        )));
    }
    run_fixed(instance, cfg, move |y, thr| truncate_top_s(&l12_threshold(y, thr)?, s))
}

/// The soft-thresholding baseline:
/// `x_{k+1} = S_{v*lambda}(x_k - v*A^T*(A*x_k - b))`.
pub fn ista_solve(instance: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverTrace> {
    cfg.validate_common(instance.matrix().n())?;
    run_fixed(instance, cfg, |y, thr| soft_threshold(y, thr))
}

/// ITA with continuation: starts at `lambda0` and multiplies the active
/// parameter by `gamma` each iteration, stopping as soon as it drops below
/// the target `lambda` (so the run takes `ceil(log_gamma(lambda/lambda0))`
/// thresholded iterations, capped at `max_iter`).
///
/// `lambda0 < lambda` is not an error: the run stops immediately and returns
/// the initial point, flagged as a continuation stop with zero iterations.
/// The relative-change tolerance does not apply to ITAC.
pub fn itac_solve(instance: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverTrace> {
    cfg.validate_common(instance.matrix().n())?;
    if cfg.lambda <= 0.0 {
        return Err(Error::Domain("itac requires a positive target lambda".into()));
    }
    let lambda0 = cfg
        .lambda0
        .ok_or_else(|| Error::Domain("itac requires the continuation start lambda0".into()))?;
    if !lambda0.is_finite() || lambda0 <= 0.0 {
        return Err(Error::Domain("lambda0 must be finite and positive".into()));
    }
    let gamma = cfg
        .gamma
        .ok_or_else(|| Error::Domain("itac requires the continuation factor gamma".into()))?;
    if !gamma.is_finite() || gamma <= 0.0 || gamma >= 1.0 {
        return Err(Error::Domain("gamma must lie strictly between 0 and 1".into()));
    }

    let a = instance.matrix().matrix();
    let b = instance.observation();
    let truth = instance.truth();
    let truth_norm = truth.norm();

    let mut x = cfg.initial_point(instance.matrix().n());
    let mut r = a * &x - b;
    let mut lam = lambda0;
    let mut metrics = vec![record(&x, r.norm(), cfg.lambda, lam, truth, truth_norm)];
    let mut iterates = matches!(cfg.trace_level, TraceLevel::FullIterates).then(|| vec![x.clone()]);
    let mut iterations_used = 0;

    let terminated_by = loop {
        if lam < cfg.lambda {
            break Termination::ContinuationStop;
        }
        if iterations_used == cfg.max_iter {
            break Termination::MaxIter;
        }
        let k = iterations_used + 1;
        let y = &x - a.tr_mul(&r) * cfg.v;
        check_finite_iter(&y, k, "the gradient step")?;
        let x_next = l12_threshold(&y, cfg.v * lam)?;
        let r_next = a * &x_next - b;
        check_finite_iter(&r_next, k, "the residual")?;
        lam *= gamma;
        metrics.push(record(&x_next, r_next.norm(), cfg.lambda, lam, truth, truth_norm));
        if let Some(list) = &mut iterates {
            list.push(x_next.clone());
        }
        x = x_next;
        r = r_next;
        iterations_used = k;
    };

    Ok(SolverTrace { solution: x, iterates, metrics, iterations_used, terminated_by })
}

/// Dispatches by name; the benchmark harness and the CLI go through here.
pub fn solve(
    kind: SolverKind,
    instance: &ProblemInstance,
    cfg: &SolverConfig,
) -> Result<SolverTrace> {
    match kind {
        SolverKind::Ista => ista_solve(instance, cfg),
        SolverKind::Ita => ita_solve(instance, cfg),
        SolverKind::Itat => itat_solve(instance, cfg),
        SolverKind::Itac => itac_solve(instance, cfg),
    }
}
