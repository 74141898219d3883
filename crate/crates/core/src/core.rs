//! Shared domain types, the l1-2 objective, and basic recovery metrics.
//!
//! Everything downstream speaks in terms of the types defined here: a dense
//! [`SensingMatrix`] with generation provenance, a ground-truth
//! [`SparseSignal`], a [`ProblemInstance`] tying the two to an observation,
//! and the [`SolverTrace`] record emitted by every solver run.

use nalgebra::{DMatrix, DVector};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operand dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// An input violates a documented precondition (non-finite data, value
    /// out of range, missing required parameter, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An exact combinatorial computation would exceed the enumeration guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// An iterate left the representable range.
    #[error("solver diverged at iteration {iteration}: {detail}")]
    Divergence { iteration: usize, detail: String },
    /// A structured text file failed to parse.
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
    /// An instance file with an unsupported format version.
    #[error("unsupported instance format version {found} (supported: {supported})")]
    Version { found: u64, supported: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(v: &DVector<f64>, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} contains a non-finite entry")))
    }
}

/// Provenance of a sensing matrix: how its entries came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// I.i.d. Gaussian entries with variance 1/m, regenerable from a seed.
    Gaussian,
    /// Random partial discrete cosine transform rows, regenerable from a seed.
    Pdct,
    /// Entries supplied directly; no generation recipe attached.
    Explicit,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Gaussian => "gaussian",
            MatrixKind::Pdct => "pdct",
            MatrixKind::Explicit => "explicit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(MatrixKind::Gaussian),
            "pdct" => Some(MatrixKind::Pdct),
            "explicit" => Some(MatrixKind::Explicit),
            _ => None,
        }
    }
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A dense m-by-n sensing matrix with provenance metadata.
///
/// For `Gaussian`/`Pdct` kinds the seed is always present and regenerating
/// from `(kind, m, n, seed)` reproduces the entries bit-exactly; `Explicit`
/// matrices carry no seed and must be persisted entry-by-entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    data: DMatrix<f64>,
    kind: MatrixKind,
    seed: Option<u64>,
}

impl SensingMatrix {
    /// Wraps caller-supplied entries given in row-major order.
    pub fn explicit(m: usize, n: usize, entries_row_major: &[f64]) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain("matrix dimensions must be at least 1x1".into()));
        }
        if entries_row_major.len() != m * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {m}x{n} matrix, got {}",
                m * n,
                entries_row_major.len()
            )));
        }
        if !entries_row_major.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(SensingMatrix {
            data: DMatrix::from_row_slice(m, n, entries_row_major),
            kind: MatrixKind::Explicit,
            seed: None,
        })
    }

    /// Wraps a generator-produced matrix together with its recipe.
    pub(crate) fn from_generated(data: DMatrix<f64>, kind: MatrixKind, seed: u64) -> Self {
        debug_assert!(data.iter().all(|x| x.is_finite()));
        SensingMatrix { data, kind, seed: Some(seed) }
    }

    pub fn m(&self) -> usize {
        self.data.nrows()
    }

    pub fn n(&self) -> usize {
        self.data.ncols()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Entries flattened in row-major order (the persistence layout).
    pub fn entries_row_major(&self) -> Vec<f64> {
        let (m, n) = (self.m(), self.n());
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }
}

/// A length-n vector with its support tracked explicitly.
///
/// The support is always derived from the values (indices of exact nonzeros,
/// ascending), so it cannot drift out of sync regardless of how the signal
/// was constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: DVector<f64>,
    support: Vec<usize>,
}

impl SparseSignal {
    pub fn from_values(values: DVector<f64>) -> Result<Self> {
        ensure_finite(&values, "signal")?;
        let support = (0..values.len()).filter(|&i| values[i] != 0.0).collect();
        Ok(SparseSignal { values, support })
    }

    pub fn zeros(n: usize) -> Self {
        SparseSignal { values: DVector::zeros(n), support: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Indices of nonzero entries, sorted ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Number of nonzeros.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }
}

/// One recovery task: sensing matrix, ground truth, noise level, observation.
///
/// Generated instances satisfy `b = A*truth + sigma*eps` with `eps` drawn
/// i.i.d. standard normal from `noise_seed` (exactly `b = A*truth` when
/// `sigma == 0`). [`ProblemInstance::from_parts`] trusts the caller's
/// observation and only checks shapes and finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    matrix: SensingMatrix,
    truth: SparseSignal,
    sigma: f64,
    observation: DVector<f64>,
    noise_seed: u64,
    signal_seed: Option<u64>,
}

impl ProblemInstance {
    pub fn from_parts(
        matrix: SensingMatrix,
        truth: SparseSignal,
        sigma: f64,
        observation: DVector<f64>,
        noise_seed: u64,
    ) -> Result<Self> {
        if truth.n() != matrix.n() {
            return Err(Error::Shape(format!(
                "truth has length {} but the matrix has {} columns",
                truth.n(),
                matrix.n()
            )));
        }
        if observation.len() != matrix.m() {
            return Err(Error::Shape(format!(
                "observation has length {} but the matrix has {} rows",
                observation.len(),
                matrix.m()
            )));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Domain("sigma must be finite and nonnegative".into()));
        }
        ensure_finite(&observation, "observation")?;
        Ok(ProblemInstance {
            matrix,
            truth,
            sigma,
            observation,
            noise_seed,
            signal_seed: None,
        })
    }

    /// Attaches the seed the ground truth was generated from, enabling
    /// seed-only persistence.
    pub(crate) fn with_signal_seed(mut self, seed: u64) -> Self {
        self.signal_seed = Some(seed);
        self
    }

    pub fn matrix(&self) -> &SensingMatrix {
        &self.matrix
    }

    pub fn truth(&self) -> &SparseSignal {
        &self.truth
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn observation(&self) -> &DVector<f64> {
        &self.observation
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise_seed
    }

    /// Present when the truth was produced by the seeded generator.
    pub fn signal_seed(&self) -> Option<u64> {
        self.signal_seed
    }
}

/// Why a solver run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Relative change between iterates fell below the tolerance.
    Tolerance,
    /// The iteration cap was reached.
    MaxIter,
    /// The continuation parameter dropped below the target (ITAC only).
    ContinuationStop,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIter => "max_iter",
            Termination::ContinuationStop => "continuation_stop",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-iteration measurements recorded by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationMetrics {
    /// l1-2 objective at the caller's target lambda (not the active one).
    pub objective: f64,
    /// `||A*x - b||_2`.
    pub residual_norm: f64,
    /// `||x - truth||_2 / ||truth||_2`; `None` when the truth has norm 0.
    pub relative_error: Option<f64>,
    /// The regularization parameter active at this iteration (constant for
    /// ITA/ITAT/ISTA, geometrically decreasing for ITAC).
    pub lambda: f64,
}

/// Full record of one solver run.
///
/// `metrics` always has `iterations_used + 1` rows: the initial point plus
/// one row per completed iteration. `iterates` is populated only when the
/// caller asks for full retention.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    /// The final iterate.
    pub solution: DVector<f64>,
    /// Every iterate including the initial point, when retained.
    pub iterates: Option<Vec<DVector<f64>>>,
    pub metrics: Vec<IterationMetrics>,
    pub iterations_used: usize,
    pub terminated_by: Termination,
}

impl SolverTrace {
    pub fn final_metrics(&self) -> &IterationMetrics {
        self.metrics.last().expect("a trace always has at least the initial row")
    }

    pub fn final_relative_error(&self) -> Option<f64> {
        self.final_metrics().relative_error
    }
}

pub(crate) fn l12_penalty(x: &DVector<f64>) -> f64 {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    l1 - x.norm()
}

/// The l1-2 objective `0.5*||A*x - b||_2^2 + lambda*(||x||_1 - ||x||_2)`.
///
/// `lambda = 0` is accepted and yields the plain least-squares objective;
/// negative `lambda` is rejected.
pub fn objective_l12(
    a: &SensingMatrix,
    b: &DVector<f64>,
    x: &DVector<f64>,
    lambda: f64,
) -> Result<f64> {
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
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain("lambda must be finite and nonnegative".into()));
    }
    ensure_finite(b, "observation")?;
    ensure_finite(x, "point")?;
    let r = a.matrix() * x - b;
    Ok(0.5 * r.norm_squared() + lambda * l12_penalty(x))
}

/// `||x - truth||_2 / ||truth||_2`.
pub fn relative_error(x: &DVector<f64>, truth: &SparseSignal) -> Result<f64> {
    if x.len() != truth.n() {
        return Err(Error::Shape(format!(
            "point has length {} but the truth has length {}",
            x.len(),
            truth.n()
        )));
    }
    let denom = truth.norm();
    if denom == 0.0 {
        return Err(Error::Domain("relative error is undefined for a zero ground truth".into()));
    }
    Ok((x - truth.values()).norm() / denom)
}

/// Whether `x` lies in the objective level set anchored at the ground truth,
/// i.e. `objective_l12(x) <= objective_l12(truth)`.
pub fn in_level_set(
    a: &SensingMatrix,
    b: &DVector<f64>,
    x: &DVector<f64>,
    truth: &SparseSignal,
    lambda: f64,
) -> Result<bool> {
    let fx = objective_l12(a, b, x, lambda)?;
    let ft = objective_l12(a, b, truth.values(), lambda)?;
    Ok(fx <= ft)
}
