//! `sparse12` — command-line front end for the l1-2 sparse-recovery toolkit.
//!
//! Subcommands: `generate` (seeded problem instances), `solve` (one solver
//! run with a trace CSV), `certify` (exact regularity constants and l1-2
//! REC certification), and `bench` (experiment plans to CSV).
//!
//! Exit codes: 0 on success, 1 on usage errors (synopsis goes to standard
//! error), 2 on runtime errors such as capacity guards or malformed files.
//! Given the same arguments, environment, and input files, every output
//! file is byte-identical across runs except for wall-clock columns.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sparse12::bench::{run_convergence, run_param_sweep, run_success_sweep, ExperimentPlan, Sweep};
use sparse12::problems::{load_instance, make_instance, save_instance, InstanceSpec};
use sparse12::regularity::{rec_certify, rec_estimate};
use sparse12::solvers::{solve, SolverConfig, SolverKind};
use sparse12::{Error, MatrixKind, SolverTrace};

#[derive(Parser)]
#[command(
    name = "sparse12",
    version,
    about = "Sparse recovery via l1-2 regularization: generate, solve, certify, bench",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded problem instance and write it to an .spi file
    Generate(GenerateArgs),
    /// Load an instance, run one solver, and write a per-iteration trace CSV
    Solve(SolveArgs),
    /// Compute exact regularity constants and certify the l1-2 REC
    Certify(CertifyArgs),
    /// Execute an experiment plan and write result CSVs
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of measurements (rows)
    #[arg(long)]
    m: usize,
    /// Signal dimension (columns)
    #[arg(long)]
    n: usize,
    /// Matrix family: gaussian or pdct
    #[arg(long, value_parser = parse_kind)]
    kind: MatrixKind,
    /// Sparsity of the planted signal
    #[arg(long)]
    s: usize,
    /// Noise standard deviation (0 for a noiseless instance)
    #[arg(long)]
    sigma: f64,
    /// Seed; matrix, signal, and noise use separate substreams of it
    #[arg(long)]
    seed: u64,
    /// Output instance file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Solver: ista, ita, itat, or itac
    #[arg(long, value_parser = parse_solver)]
    solver: SolverKind,
    /// Instance file to solve
    #[arg(long = "in")]
    input: PathBuf,
    /// Regularization parameter (the continuation target for itac)
    #[arg(long, default_value_t = ExperimentPlan::DEFAULT_LAMBDA)]
    lambda: f64,
    /// Step size
    #[arg(long, default_value_t = SolverConfig::DEFAULT_STEP)]
    v: f64,
    /// Iteration cap
    #[arg(long, default_value_t = SolverConfig::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Relative-change stopping tolerance
    #[arg(long, default_value_t = SolverConfig::DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Truncation level (required by itat)
    #[arg(long, required_if_eq("solver", "itat"))]
    trunc_s: Option<usize>,
    /// Continuation start (required by itac)
    #[arg(long, required_if_eq("solver", "itac"))]
    lambda0: Option<f64>,
    /// Continuation decay factor (required by itac)
    #[arg(long, required_if_eq("solver", "itac"))]
    gamma: Option<f64>,
    /// Output trace CSV
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    /// Instance file whose sensing matrix is analyzed
    #[arg(long = "in")]
    input: PathBuf,
    /// Sparsity level of the certificate
    #[arg(long)]
    s: usize,
    /// Companion block size of the certificate
    #[arg(long)]
    t: usize,
    /// Also report a sampled lower estimate of phi from this many draws
    #[arg(long)]
    estimate_samples: Option<usize>,
    /// Seed for the sampled estimate
    #[arg(long, default_value_t = 0)]
    estimate_seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Plan file (key = value lines; see the repository README for the schema)
    #[arg(long)]
    plan: PathBuf,
    /// Directory for raw.csv, aggregate.csv, and (for convergence) curves.csv
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_kind(s: &str) -> Result<MatrixKind, String> {
    match MatrixKind::parse(s) {
        Some(MatrixKind::Explicit) | None => {
            Err(format!("unknown matrix kind `{s}` (expected gaussian or pdct)"))
        }
        Some(kind) => Ok(kind),
    }
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    SolverKind::parse(s).ok_or_else(|| format!("unknown solver `{s}`"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    if let Err(message) = configure_threads() {
        eprintln!("{message}");
        eprintln!("usage: set SPARSE12_THREADS to a positive integer or unset it");
        return ExitCode::from(1);
    }

    let result = match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Solve(args) => run_solve(args),
        Command::Certify(args) => run_certify(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// Caps the rayon worker count from SPARSE12_THREADS before any pool use.
fn configure_threads() -> Result<(), String> {
    match std::env::var("SPARSE12_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("SPARSE12_THREADS is not valid unicode: {e}")),
        Ok(raw) => {
            let threads: usize = raw
                .parse()
                .map_err(|_| format!("SPARSE12_THREADS must be a positive integer, got `{raw}`"))?;
            if threads == 0 {
                return Err("SPARSE12_THREADS must be at least 1".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| format!("could not configure the thread pool: {e}"))
        }
    }
}

fn run_generate(args: GenerateArgs) -> Result<(), Error> {
    let spec = InstanceSpec {
        m: args.m,
        n: args.n,
        matrix_kind: args.kind,
        sparsity: args.s,
        sigma: args.sigma,
        matrix_seed: args.seed,
        signal_seed: args.seed,
        noise_seed: args.seed,
    };
    let instance = make_instance(&spec)?;
    save_instance(&instance, &args.out)?;
    println!(
        "wrote {} ({}x{} {}, s={}, sigma={}, seed={})",
        args.out.display(),
        args.m,
        args.n,
        args.kind.as_str(),
        args.s,
        args.sigma,
        args.seed
    );
    Ok(())
}

fn trace_csv(trace: &SolverTrace) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("iteration,lambda,objective,residual_norm,relative_error\n");
    for (k, row) in trace.metrics.iter().enumerate() {
        let re = row.relative_error.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            k, row.lambda, row.objective, row.residual_norm, re
        );
    }
    out
}

fn run_solve(args: SolveArgs) -> Result<(), Error> {
    let instance = load_instance(&args.input)?;
    let mut cfg = SolverConfig::new(args.lambda);
    cfg.v = args.v;
    cfg.max_iter = args.max_iter;
    cfg.rel_tol = args.rel_tol;
    cfg.trunc_s = args.trunc_s;
    cfg.lambda0 = args.lambda0;
    cfg.gamma = args.gamma;
    let trace = solve(args.solver, &instance, &cfg)?;
    std::fs::write(&args.trace, trace_csv(&trace))?;
    let re = trace
        .final_relative_error()
        .map(|v| v.to_string())
        .unwrap_or_else(|| "n/a".into());
    println!(
        "{}: final_re={} iterations={} terminated_by={} trace={}",
        args.solver,
        re,
        trace.iterations_used,
        trace.terminated_by,
        args.trace.display()
    );
    Ok(())
}

fn run_certify(args: CertifyArgs) -> Result<(), Error> {
    let instance = load_instance(&args.input)?;
    let report = rec_certify(instance.matrix(), args.s, args.t)?;
    print!("{}", report.render());
    if let Some(samples) = args.estimate_samples {
        let estimate =
            rec_estimate(instance.matrix(), args.s, args.t, samples, args.estimate_seed)?;
        println!(
            "sampled phi estimate ({} samples, seed {}): {}",
            samples, args.estimate_seed, estimate
        );
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Error> {
    let plan = ExperimentPlan::from_file(&args.plan)?;
    // the sweep field picks the driver, so a plan file is self-describing
    let result = match plan.sweep {
        Sweep::None => run_convergence(&plan)?,
        Sweep::Sparsity(_) => run_success_sweep(&plan)?,
        Sweep::Gamma(_) | Sweep::TruncS(_) => run_param_sweep(&plan)?,
    };
    std::fs::create_dir_all(&args.out_dir)?;
    let raw = args.out_dir.join("raw.csv");
    std::fs::write(&raw, result.raw_csv())?;
    println!("wrote {}", raw.display());
    let aggregate = args.out_dir.join("aggregate.csv");
    std::fs::write(&aggregate, result.aggregate_csv())?;
    println!("wrote {}", aggregate.display());
    if !result.curves.is_empty() {
        let curves = args.out_dir.join("curves.csv");
        std::fs::write(&curves, result.curves_csv())?;
        println!("wrote {}", curves.display());
    }
    Ok(())
}
