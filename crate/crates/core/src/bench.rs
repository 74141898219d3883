//! Benchmark drivers: convergence-curve comparisons, success-rate sweeps
//! over sparsity, and parameter sweeps for the continuation factor and the
//! truncation level, with CSV outputs.
//!
//! Every experiment follows one protocol: trial `i` builds its instance
//! from the seed `seed_base ^ i` (matrix, signal, and noise each draw from
//! their own substream of that seed), runs the requested solvers, and
//! records the final relative error, the iteration count, and the wall
//! time. Trials run concurrently but are collected in trial order and
//! aggregated sequentially, so results are identical for every worker
//! count; wall-clock seconds are informational only and are the one column
//! excluded from that guarantee.
//!
//! A diverged trial is recorded with an infinite relative error (and
//! poisons any mean it contributes to) rather than aborting the run.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::core::{Error, MatrixKind, ProblemInstance, Result};
use crate::problems::{make_instance, InstanceSpec};
use crate::solvers::{solve, SolverConfig, SolverKind};

/// Which plan variable a run sweeps over, if any.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    None,
    Gamma(Vec<f64>),
    TruncS(Vec<usize>),
    Sparsity(Vec<usize>),
}

/// A full experiment description: the instance template, the solver list
/// with its shared configuration, the trial protocol, and the sweep.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub m: usize,
    pub n: usize,
    pub matrix_kind: MatrixKind,
    /// True sparsity of the planted signal (the per-point value during a
    /// sparsity sweep).
    pub sparsity: usize,
    pub sigma: f64,
    pub solvers: Vec<SolverKind>,
    pub lambda: f64,
    pub step_size: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Truncation level for ITAT; defaults to the true sparsity.
    pub trunc_s: Option<usize>,
    /// Continuation start for ITAC; defaults to `||A^T b||_inf` per
    /// instance, which makes the first thresholded iterate nonzero.
    pub lambda0: Option<f64>,
    /// Continuation decay factor for ITAC.
    pub gamma: Option<f64>,
    pub trials: usize,
    pub seed_base: u64,
    pub sweep: Sweep,
    /// A trial counts as a successful recovery when its relative error
    /// falls strictly below this threshold.
    pub success_threshold: f64,
}

impl ExperimentPlan {
    pub const DEFAULT_LAMBDA: f64 = 1e-3;
    pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.01;

    /// A plan with the standard experiment protocol: `lambda = 1e-3`,
    /// `v = 0.5`, at most 500 iterations at relative tolerance `1e-6`,
    /// success threshold 0.01, all four solvers, no sweep.
    pub fn new(m: usize, n: usize, matrix_kind: MatrixKind, sparsity: usize, sigma: f64) -> Self {
        ExperimentPlan {
            m,
            n,
            matrix_kind,
            sparsity,
            sigma,
            solvers: vec![SolverKind::Ista, SolverKind::Ita, SolverKind::Itat, SolverKind::Itac],
            lambda: Self::DEFAULT_LAMBDA,
            step_size: SolverConfig::DEFAULT_STEP,
            max_iter: SolverConfig::DEFAULT_MAX_ITER,
            rel_tol: SolverConfig::DEFAULT_REL_TOL,
            trunc_s: None,
            lambda0: None,
            gamma: None,
            trials: 100,
            seed_base: 0,
            sweep: Sweep::None,
            success_threshold: Self::DEFAULT_SUCCESS_THRESHOLD,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        if self.matrix_kind == MatrixKind::Explicit {
            return Err(Error::Domain("experiment plans describe generated matrices".into()));
        }
        if self.sparsity == 0 || self.sparsity > self.n {
            return Err(Error::Domain(format!(
                "sparsity {} must lie in 1..={}",
                self.sparsity, self.n
            )));
        }
        if self.solvers.is_empty() {
            return Err(Error::Domain("the solver list is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("need at least one trial".into()));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::Domain("the success threshold must be positive".into()));
        }
        let grid_empty = match &self.sweep {
            Sweep::None => false,
            Sweep::Gamma(g) => g.is_empty(),
            Sweep::TruncS(g) => g.is_empty(),
            Sweep::Sparsity(g) => g.is_empty(),
        };
        if grid_empty {
            return Err(Error::Domain("the sweep grid is empty".into()));
        }
        Ok(())
    }

    /// Parses a plan from `key = value` text: `#` comments and blank lines
    /// are ignored, duplicate or unknown keys are rejected with their line
    /// number. Required keys: `m`, `n`, `kind`, `sparsity`, `sigma`,
    /// `trials`, `seed_base`; `sweep` (none/gamma/trunc_s/sparsity) needs a
    /// `grid` when it is not `none`; everything else falls back to the
    /// defaults of [`ExperimentPlan::new`].
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut fields: std::collections::BTreeMap<&str, (usize, &str)> =
            std::collections::BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                detail: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if fields.insert(key, (line_no, value)).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    detail: format!("duplicate key `{key}`"),
                });
            }
        }

        let known = [
            "m", "n", "kind", "sparsity", "sigma", "solvers", "lambda", "step_size", "max_iter",
            "rel_tol", "trunc_s", "lambda0", "gamma", "trials", "seed_base", "sweep", "grid",
            "success_threshold",
        ];
        for (key, (line, _)) in &fields {
            if !known.contains(key) {
                return Err(Error::Parse { line: *line, detail: format!("unknown key `{key}`") });
            }
        }

        fn get<'a>(
            fields: &std::collections::BTreeMap<&str, (usize, &'a str)>,
            key: &str,
        ) -> Result<(usize, &'a str)> {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| Error::Parse { line: 0, detail: format!("missing key `{key}`") })
        }
        fn parse<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| Error::Parse {
                line,
                detail: format!("invalid value `{value}` for `{key}`"),
            })
        }

        let (line, value) = get(&fields, "m")?;
        let m = parse(line, "m", value)?;
        let (line, value) = get(&fields, "n")?;
        let n = parse(line, "n", value)?;
        let (line, value) = get(&fields, "kind")?;
        let matrix_kind = MatrixKind::parse(value)
            .ok_or_else(|| Error::Parse { line, detail: format!("unknown matrix kind `{value}`") })?;
        let (line, value) = get(&fields, "sparsity")?;
        let sparsity = parse(line, "sparsity", value)?;
        let (line, value) = get(&fields, "sigma")?;
        let sigma = parse(line, "sigma", value)?;

        let mut plan = ExperimentPlan::new(m, n, matrix_kind, sparsity, sigma);

        let (line, value) = get(&fields, "trials")?;
        plan.trials = parse(line, "trials", value)?;
        let (line, value) = get(&fields, "seed_base")?;
        plan.seed_base = parse(line, "seed_base", value)?;

        if let Some(&(line, value)) = fields.get("solvers") {
            plan.solvers = value
                .split(',')
                .map(|name| {
                    SolverKind::parse(name.trim()).ok_or_else(|| Error::Parse {
                        line,
                        detail: format!("unknown solver `{}`", name.trim()),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(&(line, value)) = fields.get("lambda") {
            plan.lambda = parse(line, "lambda", value)?;
        }
        if let Some(&(line, value)) = fields.get("step_size") {
            plan.step_size = parse(line, "step_size", value)?;
        }
        if let Some(&(line, value)) = fields.get("max_iter") {
            plan.max_iter = parse(line, "max_iter", value)?;
        }
        if let Some(&(line, value)) = fields.get("rel_tol") {
            plan.rel_tol = parse(line, "rel_tol", value)?;
        }
        if let Some(&(line, value)) = fields.get("trunc_s") {
            plan.trunc_s = Some(parse(line, "trunc_s", value)?);
        }
        if let Some(&(line, value)) = fields.get("lambda0") {
            plan.lambda0 = Some(parse(line, "lambda0", value)?);
        }
        if let Some(&(line, value)) = fields.get("gamma") {
            plan.gamma = Some(parse(line, "gamma", value)?);
        }
        if let Some(&(line, value)) = fields.get("success_threshold") {
            plan.success_threshold = parse(line, "success_threshold", value)?;
        }

        let sweep_kind = fields.get("sweep").map(|&(_, v)| v).unwrap_or("none");
        plan.sweep = match sweep_kind {
            "none" => Sweep::None,
            "gamma" | "trunc_s" | "sparsity" => {
                let (line, value) = get(&fields, "grid")?;
                match sweep_kind {
                    "gamma" => Sweep::Gamma(
                        value
                            .split(',')
                            .map(|v| parse(line, "grid", v.trim()))
                            .collect::<Result<Vec<f64>>>()?,
                    ),
                    "trunc_s" => Sweep::TruncS(
                        value
                            .split(',')
                            .map(|v| parse(line, "grid", v.trim()))
                            .collect::<Result<Vec<usize>>>()?,
                    ),
                    _ => Sweep::Sparsity(
                        value
                            .split(',')
                            .map(|v| parse(line, "grid", v.trim()))
                            .collect::<Result<Vec<usize>>>()?,
                    ),
                }
            }
            other => {
                let line = fields.get("sweep").map(|&(l, _)| l).unwrap_or(0);
                return Err(Error::Parse {
                    line,
                    detail: format!("unknown sweep `{other}`"),
                });
            }
        };
        if fields.contains_key("grid") && plan.sweep == Sweep::None {
            let (line, _) = get(&fields, "grid")?;
            return Err(Error::Parse { line, detail: "grid given without a sweep".into() });
        }

        plan.validate()?;
        Ok(plan)
    }
}

/// One (sweep value, solver, trial) outcome.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub sweep_value: f64,
    pub solver: SolverKind,
    pub trial: usize,
    pub re: f64,
    pub iterations: usize,
    /// Wall time; informational only, excluded from determinism guarantees.
    pub seconds: f64,
}

/// Aggregates over the trials of one (sweep value, solver) cell.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub sweep_value: f64,
    pub solver: SolverKind,
    pub mean_re: f64,
    pub median_re: f64,
    pub success_rate: f64,
    pub mean_iterations: f64,
    /// Informational; not written to the aggregate CSV.
    pub mean_seconds: f64,
}

/// One point of a mean relative-error-vs-iteration curve.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub iteration: usize,
    pub solver: SolverKind,
    pub mean_re: f64,
}

/// Everything a run produced. The curve list is populated by
/// [`run_convergence`] only.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub trials: Vec<TrialRow>,
    pub aggregates: Vec<AggregateRow>,
    pub curves: Vec<CurvePoint>,
}

impl ExperimentResult {
    /// Per-trial rows: `sweep_value,solver,trial,re,iterations,seconds`.
    pub fn raw_csv(&self) -> String {
        let mut out = String::from("sweep_value,solver,trial,re,iterations,seconds\n");
        for row in &self.trials {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6}",
                row.sweep_value, row.solver, row.trial, row.re, row.iterations, row.seconds
            );
        }
        out
    }

    /// Aggregate rows: `sweep_value,solver,mean_re,median_re,success_rate,mean_iters`.
    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from("sweep_value,solver,mean_re,median_re,success_rate,mean_iters\n");
        for row in &self.aggregates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                row.sweep_value,
                row.solver,
                row.mean_re,
                row.median_re,
                row.success_rate,
                row.mean_iterations
            );
        }
        out
    }

    /// Convergence rows: `iteration,solver,mean_re`.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("iteration,solver,mean_re\n");
        for p in &self.curves {
            let _ = writeln!(out, "{},{},{}", p.iteration, p.solver, p.mean_re);
        }
        out
    }
}

/// Median by sorting; an even count averages the two middle values.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// The outcome of one trial; `re_curve` is kept only when the caller needs
/// per-iteration errors.
struct TrialOutcome {
    re: f64,
    iterations: usize,
    seconds: f64,
    re_curve: Option<Vec<f64>>,
}

fn trial_instance(plan: &ExperimentPlan, sparsity: usize, trial: usize) -> Result<ProblemInstance> {
    let seed = plan.seed_base ^ trial as u64;
    make_instance(&InstanceSpec {
        m: plan.m,
        n: plan.n,
        matrix_kind: plan.matrix_kind,
        sparsity,
        sigma: plan.sigma,
        matrix_seed: seed,
        signal_seed: seed,
        noise_seed: seed,
    })
}

fn run_trial(
    plan: &ExperimentPlan,
    solver: SolverKind,
    sparsity: usize,
    trunc_s: usize,
    gamma: Option<f64>,
    trial: usize,
    keep_curve: bool,
) -> Result<TrialOutcome> {
    let instance = trial_instance(plan, sparsity, trial)?;
    let mut cfg = SolverConfig::new(plan.lambda);
    cfg.v = plan.step_size;
    cfg.max_iter = plan.max_iter;
    cfg.rel_tol = plan.rel_tol;
    match solver {
        SolverKind::Itat => cfg.trunc_s = Some(trunc_s),
        SolverKind::Itac => {
            cfg.lambda0 = Some(
                plan.lambda0
                    .unwrap_or_else(|| {
                        instance.matrix().matrix().tr_mul(instance.observation()).amax()
                    }),
            );
            cfg.gamma = Some(gamma.ok_or_else(|| {
                Error::Domain("the plan runs itac but sets no gamma".into())
            })?);
        }
        SolverKind::Ista | SolverKind::Ita => {}
    }

    let start = Instant::now();
    match solve(solver, &instance, &cfg) {
        Ok(trace) => Ok(TrialOutcome {
            re: trace.final_relative_error().unwrap_or(1.0),
            iterations: trace.iterations_used,
            seconds: start.elapsed().as_secs_f64(),
            re_curve: keep_curve.then(|| {
                trace.metrics.iter().map(|m| m.relative_error.unwrap_or(1.0)).collect()
            }),
        }),
        // a diverged trial is data, not a failure of the experiment
        Err(Error::Divergence { iteration, .. }) => Ok(TrialOutcome {
            re: f64::INFINITY,
            iterations: iteration,
            seconds: start.elapsed().as_secs_f64(),
            re_curve: keep_curve.then(|| vec![f64::INFINITY]),
        }),
        Err(other) => Err(other),
    }
}

/// Runs all trials of one (sweep value, solver) cell concurrently,
/// collected in trial order.
fn run_cell(
    plan: &ExperimentPlan,
    solver: SolverKind,
    sparsity: usize,
    trunc_s: usize,
    gamma: Option<f64>,
    keep_curves: bool,
) -> Result<Vec<TrialOutcome>> {
    (0..plan.trials)
        .into_par_iter()
        .map(|trial| run_trial(plan, solver, sparsity, trunc_s, gamma, trial, keep_curves))
        .collect()
}

fn aggregate_cell(
    sweep_value: f64,
    solver: SolverKind,
    outcomes: &[TrialOutcome],
    threshold: f64,
) -> AggregateRow {
    let count = outcomes.len() as f64;
    let mut res: Vec<f64> = outcomes.iter().map(|o| o.re).collect();
    let successes = res.iter().filter(|re| **re < threshold).count();
    AggregateRow {
        sweep_value,
        solver,
        mean_re: res.iter().sum::<f64>() / count,
        median_re: median(&mut res),
        success_rate: successes as f64 / count,
        mean_iterations: outcomes.iter().map(|o| o.iterations as f64).sum::<f64>() / count,
        mean_seconds: outcomes.iter().map(|o| o.seconds).sum::<f64>() / count,
    }
}

fn push_rows(rows: &mut Vec<TrialRow>, sweep_value: f64, solver: SolverKind, outcomes: &[TrialOutcome]) {
    for (trial, o) in outcomes.iter().enumerate() {
        rows.push(TrialRow {
            sweep_value,
            solver,
            trial,
            re: o.re,
            iterations: o.iterations,
            seconds: o.seconds,
        });
    }
}

/// Compares per-iteration convergence across the plan's solvers: every
/// trial records its relative error at each iteration, and the curves
/// average those across trials. A trial that stopped early contributes its
/// final value at every later iteration, so each curve point averages the
/// full trial count. Requires a plan without a sweep; the recorded sweep
/// value is the true sparsity.
pub fn run_convergence(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    if plan.sweep != Sweep::None {
        return Err(Error::Domain("convergence runs do not sweep".into()));
    }
    let sweep_value = plan.sparsity as f64;
    let trunc_s = plan.trunc_s.unwrap_or(plan.sparsity);

    let mut trials = Vec::new();
    let mut aggregates = Vec::new();
    let mut curves = Vec::new();
    for &solver in &plan.solvers {
        let outcomes = run_cell(plan, solver, plan.sparsity, trunc_s, plan.gamma, true)?;
        push_rows(&mut trials, sweep_value, solver, &outcomes);
        aggregates.push(aggregate_cell(sweep_value, solver, &outcomes, plan.success_threshold));

        let longest = outcomes
            .iter()
            .map(|o| o.re_curve.as_ref().map_or(1, Vec::len))
            .max()
            .unwrap_or(1);
        for k in 0..longest {
            let mean = outcomes
                .iter()
                .map(|o| {
                    let curve = o.re_curve.as_ref().expect("convergence trials keep curves");
                    *curve.get(k).unwrap_or_else(|| curve.last().expect("curves are nonempty"))
                })
                .sum::<f64>()
                / plan.trials as f64;
            curves.push(CurvePoint { iteration: k, solver, mean_re: mean });
        }
    }
    Ok(ExperimentResult { trials, aggregates, curves })
}

/// Sweeps the true sparsity and reports, per grid value and solver, the
/// fraction of trials whose relative error beats the success threshold.
/// ITAT truncates at the plan's `trunc_s` if given, else at the current
/// grid value.
pub fn run_success_sweep(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let Sweep::Sparsity(grid) = &plan.sweep else {
        return Err(Error::Domain("success sweeps vary the sparsity".into()));
    };
    let mut trials = Vec::new();
    let mut aggregates = Vec::new();
    for &sparsity in grid {
        for &solver in &plan.solvers {
            let trunc_s = plan.trunc_s.unwrap_or(sparsity);
            let outcomes = run_cell(plan, solver, sparsity, trunc_s, plan.gamma, false)?;
            push_rows(&mut trials, sparsity as f64, solver, &outcomes);
            aggregates.push(aggregate_cell(
                sparsity as f64,
                solver,
                &outcomes,
                plan.success_threshold,
            ));
        }
    }
    Ok(ExperimentResult { trials, aggregates, curves: Vec::new() })
}

/// Sweeps one solver parameter at the plan's true sparsity: a gamma sweep
/// runs ITAC at each grid value, a truncation sweep runs ITAT. The plan's
/// solver list is ignored — the swept parameter pins the solver.
pub fn run_param_sweep(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let mut trials = Vec::new();
    let mut aggregates = Vec::new();
    match &plan.sweep {
        Sweep::Gamma(grid) => {
            for &gamma in grid {
                let trunc_s = plan.trunc_s.unwrap_or(plan.sparsity);
                let outcomes =
                    run_cell(plan, SolverKind::Itac, plan.sparsity, trunc_s, Some(gamma), false)?;
                push_rows(&mut trials, gamma, SolverKind::Itac, &outcomes);
                aggregates.push(aggregate_cell(
                    gamma,
                    SolverKind::Itac,
                    &outcomes,
                    plan.success_threshold,
                ));
            }
        }
        Sweep::TruncS(grid) => {
            for &trunc_s in grid {
                let outcomes =
                    run_cell(plan, SolverKind::Itat, plan.sparsity, trunc_s, plan.gamma, false)?;
                push_rows(&mut trials, trunc_s as f64, SolverKind::Itat, &outcomes);
                aggregates.push(aggregate_cell(
                    trunc_s as f64,
                    SolverKind::Itat,
                    &outcomes,
                    plan.success_threshold,
                ));
            }
        }
        _ => {
            return Err(Error::Domain(
                "parameter sweeps vary gamma or the truncation level".into(),
            ))
        }
    }
    Ok(ExperimentResult { trials, aggregates, curves: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::ita_solve;
    use approx::assert_relative_eq;

    fn tiny_plan() -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(16, 32, MatrixKind::Gaussian, 3, 0.0);
        plan.trials = 4;
        plan.seed_base = 11;
        plan.max_iter = 60;
        plan.gamma = Some(0.9);
        plan
    }

    #[test]
    fn median_handles_even_and_odd_counts() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&mut [1.0]), 1.0);
    }

    #[test]
    fn single_trial_curve_is_the_trace_error_column() {
        let mut plan = tiny_plan();
        plan.trials = 1;
        plan.solvers = vec![SolverKind::Ita];
        let result = run_convergence(&plan).unwrap();

        let instance = trial_instance(&plan, plan.sparsity, 0).unwrap();
        let mut cfg = SolverConfig::new(plan.lambda);
        cfg.v = plan.step_size;
        cfg.max_iter = plan.max_iter;
        cfg.rel_tol = plan.rel_tol;
        let trace = ita_solve(&instance, &cfg).unwrap();

        assert_eq!(result.curves.len(), trace.metrics.len());
        for (point, metrics) in result.curves.iter().zip(&trace.metrics) {
            assert_eq!(point.mean_re, metrics.relative_error.unwrap());
        }
        assert_eq!(result.trials.len(), 1);
        assert_eq!(result.trials[0].re, trace.final_relative_error().unwrap());
        assert_eq!(result.trials[0].iterations, trace.iterations_used);
    }

    #[test]
    fn results_are_byte_identical_across_runs_and_pools() {
        let plan = tiny_plan();
        let first = run_convergence(&plan).unwrap();
        let second = run_convergence(&plan).unwrap();
        assert_eq!(first.aggregate_csv(), second.aggregate_csv());
        assert_eq!(first.curves_csv(), second.curves_csv());

        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let third = pool.install(|| run_convergence(&plan)).unwrap();
        assert_eq!(first.aggregate_csv(), third.aggregate_csv());
        assert_eq!(first.curves_csv(), third.curves_csv());
    }

    #[test]
    fn convergence_covers_every_solver_and_trial() {
        let plan = tiny_plan();
        let result = run_convergence(&plan).unwrap();
        assert_eq!(result.trials.len(), 4 * plan.trials);
        assert_eq!(result.aggregates.len(), 4);
        for agg in &result.aggregates {
            assert!((0.0..=1.0).contains(&agg.success_rate));
            assert_eq!(agg.sweep_value, 3.0);
        }
        assert!(result.curves.iter().all(|p| p.mean_re.is_finite()));
        // iteration 0 starts from the zero initial point: RE = 1
        for &solver in &plan.solvers {
            let first = result
                .curves
                .iter()
                .find(|p| p.solver == solver && p.iteration == 0)
                .unwrap();
            assert_eq!(first.mean_re, 1.0);
        }
    }

    #[test]
    fn success_sweep_tracks_the_difficulty_of_the_regime() {
        // ITAT with the default truncation (the swept sparsity itself):
        // 1-sparse recovery from 20 measurements is immediate, 19-sparse
        // recovery from 20 is hopeless.
        let mut plan = ExperimentPlan::new(20, 40, MatrixKind::Gaussian, 1, 0.0);
        plan.trials = 8;
        plan.seed_base = 3;
        plan.solvers = vec![SolverKind::Itat];
        plan.sweep = Sweep::Sparsity(vec![1, 19]);
        let result = run_success_sweep(&plan).unwrap();
        assert_eq!(result.aggregates.len(), 2);
        let easy = &result.aggregates[0];
        let hard = &result.aggregates[1];
        assert_eq!(easy.sweep_value, 1.0);
        assert_eq!(easy.success_rate, 1.0, "s=1 of n=40 must recover");
        assert!(hard.success_rate <= 0.5, "s=19 of m=20 should mostly fail");
        assert!(result.curves.is_empty());
    }

    #[test]
    fn param_sweep_pins_the_solver() {
        let mut plan = tiny_plan();
        plan.sweep = Sweep::Gamma(vec![0.5, 0.9]);
        let result = run_param_sweep(&plan).unwrap();
        assert!(result.trials.iter().all(|r| r.solver == SolverKind::Itac));
        assert_eq!(result.aggregates.len(), 2);
        assert_eq!(result.aggregates[0].sweep_value, 0.5);

        plan.sweep = Sweep::TruncS(vec![3, 6]);
        let result = run_param_sweep(&plan).unwrap();
        assert!(result.trials.iter().all(|r| r.solver == SolverKind::Itat));

        plan.sweep = Sweep::None;
        assert!(run_param_sweep(&plan).is_err());
        plan.sweep = Sweep::Sparsity(vec![2]);
        assert!(run_param_sweep(&plan).is_err());
    }

    #[test]
    fn zero_solutions_count_as_failures_with_unit_error() {
        let mut plan = tiny_plan();
        plan.lambda = 1e6; // threshold swallows every gradient step
        plan.solvers = vec![SolverKind::Ita];
        plan.trials = 2;
        let result = run_convergence(&plan).unwrap();
        assert!(result.trials.iter().all(|r| r.re == 1.0));
        assert_eq!(result.aggregates[0].success_rate, 0.0);
    }

    #[test]
    fn csv_headers_and_shapes() {
        let mut plan = tiny_plan();
        plan.solvers = vec![SolverKind::Ita];
        plan.trials = 2;
        let result = run_convergence(&plan).unwrap();
        let raw = result.raw_csv();
        assert!(raw.starts_with("sweep_value,solver,trial,re,iterations,seconds\n"));
        assert_eq!(raw.lines().count(), 1 + 2);
        let agg = result.aggregate_csv();
        assert!(agg.starts_with("sweep_value,solver,mean_re,median_re,success_rate,mean_iters\n"));
        assert_eq!(agg.lines().count(), 2);
        let curves = result.curves_csv();
        assert!(curves.starts_with("iteration,solver,mean_re\n"));
        assert!(raw.contains(",ita,"));
    }

    #[test]
    fn plan_files_round_trip_and_reject_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.txt");
        std::fs::write(
            &path,
            "# demo plan\nm = 16\nn = 32\nkind = gaussian\nsparsity = 3\nsigma = 0.001\n\
             trials = 5\nseed_base = 9\nsolvers = ita, itac\ngamma = 0.95\n\
             sweep = gamma\ngrid = 0.9, 0.95, 0.99\n",
        )
        .unwrap();
        let plan = ExperimentPlan::from_file(&path).unwrap();
        assert_eq!((plan.m, plan.n, plan.sparsity), (16, 32, 3));
        assert_eq!(plan.matrix_kind, MatrixKind::Gaussian);
        assert_eq!(plan.solvers, vec![SolverKind::Ita, SolverKind::Itac]);
        assert_eq!(plan.sweep, Sweep::Gamma(vec![0.9, 0.95, 0.99]));
        assert_eq!(plan.lambda, ExperimentPlan::DEFAULT_LAMBDA);
        assert_eq!(plan.trials, 5);
        assert_relative_eq!(plan.sigma, 0.001);

        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "m = 16\nm = 17\n").unwrap();
        assert!(matches!(ExperimentPlan::from_file(&bad), Err(Error::Parse { line: 2, .. })));
        std::fs::write(&bad, "m = 16\nwhat = 3\n").unwrap();
        assert!(matches!(ExperimentPlan::from_file(&bad), Err(Error::Parse { .. })));
        std::fs::write(&bad, "m = 16\nn = 8\nkind = gaussian\nsparsity = 2\nsigma = 0\ntrials = 1\nseed_base = 0\nsweep = gamma\n").unwrap();
        assert!(matches!(ExperimentPlan::from_file(&bad), Err(Error::Parse { .. })));
        std::fs::write(&bad, "m = 16\nn = 8\nkind = gaussian\nsparsity = 2\nsigma = 0\ntrials = 1\nseed_base = 0\ngrid = 1,2\n").unwrap();
        assert!(matches!(ExperimentPlan::from_file(&bad), Err(Error::Parse { .. })));
    }

    #[test]
    fn plans_validate_their_shape() {
        let mut plan = tiny_plan();
        plan.trials = 0;
        assert!(plan.validate().is_err());
        let mut plan = tiny_plan();
        plan.solvers.clear();
        assert!(plan.validate().is_err());
        let mut plan = tiny_plan();
        plan.sweep = Sweep::Sparsity(Vec::new());
        assert!(plan.validate().is_err());
        let mut plan = tiny_plan();
        plan.sparsity = 0;
        assert!(plan.validate().is_err());
    }
}
