use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use mgvi::bench::{
    generate_lasso_instance, load_custom_instance, run_experiment, run_on_lasso, run_on_saddle, save_instance,
    write_trace, Experiment, ExperimentConfig, InstanceFile, InstanceKind, SolverName,
};
use mgvi::lasso::Lasso;
use mgvi::linalg::Vector;
use mgvi::saddle::SaddlePoint;
use mgvi::solvers::{SolveResult, SolverParams};

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "mgvi", version, about = "Predictor-corrector solvers for monotone variational inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the sparse-recovery benchmarks on a seeded instance
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Solve an instance file with one solver
    Solve(SolveArgs),
    /// Write a seeded instance file
    Generate(GenerateArgs),
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// min ½‖Ax − b‖² + λ‖x‖₁
    Lasso(LassoArgs),
    /// min ‖x‖₁ s.t. Ax = b
    Bp(BpArgs),
}

#[derive(Args, Debug)]
struct CommonBench {
    #[arg(long, default_value_t = 1000)]
    m: usize,
    #[arg(long, default_value_t = 1100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Directory for trace CSVs and summary.txt
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run solvers at the same time (wall times overlap)
    #[arg(long)]
    concurrent: bool,
}

#[derive(Args, Debug)]
struct LassoArgs {
    #[command(flatten)]
    common: CommonBench,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', default_value = "ista,gem,pga-a1,pga-a2,pga-b1,pga-b2")]
    solvers: Vec<String>,
}

#[derive(Args, Debug)]
struct BpArgs {
    #[command(flatten)]
    common: CommonBench,
    #[arg(long, value_delimiter = ',', default_value = "adlpmm,gem,pga-a1,pga-b1")]
    solvers: Vec<String>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solver: String,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    /// Fixed β for pga-a2 / pga-b2
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write the iteration trace here as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// lasso or bp
    #[arg(long, default_value = "lasso")]
    kind: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    out: PathBuf,
}

/// An error that maps to exit code 1 rather than 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

/// Reads `MGVI_THREADS`, sizes the global pool, and returns the lane count.
fn configure_threads() -> Result<usize> {
    let threads = match std::env::var("MGVI_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(usage(format!("MGVI_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("could not start the worker pool")?;
    Ok(threads)
}

fn parse_solvers(names: &[String]) -> Result<Vec<SolverName>> {
    if names.is_empty() {
        return Err(usage("solver list is empty"));
    }
    names.iter().map(|s| s.parse::<SolverName>().map_err(usage)).collect()
}

fn run_bench(cmd: BenchCommand, threads: usize) -> Result<u8> {
    let (experiment, common, solvers, lambda) = match cmd {
        BenchCommand::Lasso(a) => (Experiment::Lasso, a.common, a.solvers, a.lambda),
        BenchCommand::Bp(a) => (Experiment::BasisPursuit, a.common, a.solvers, 1.0),
    };
    let mut cfg = ExperimentConfig::new(experiment, common.m, common.n, common.seed);
    cfg.lambda_reg = lambda;
    cfg.solvers = parse_solvers(&solvers)?;
    cfg.params.tol_inf = common.tol;
    cfg.params.max_iter = common.max_iter;
    cfg.out_dir = common.out;
    cfg.concurrent = common.concurrent;
    cfg.parallel_lanes = threads > 1;
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let report = run_experiment(&cfg)?;
    print!("{}", report.table(true));
    Ok(if report.all_converged() { 0 } else { EXIT_SOLVER })
}

fn solver_params(a: &SolveArgs) -> SolverParams {
    let d = SolverParams::default();
    SolverParams {
        nu: a.nu.unwrap_or(d.nu),
        mu: a.mu.unwrap_or(d.mu),
        gamma: a.gamma.unwrap_or(d.gamma),
        beta0: a.beta0.unwrap_or(d.beta0),
        fixed_beta: a.beta,
        tol_inf: a.tol.unwrap_or(d.tol_inf),
        max_iter: a.max_iter.unwrap_or(d.max_iter),
        ..d
    }
}

fn print_vector(name: &str, v: &[f64]) {
    let body: Vec<String> = v.iter().map(|x| format!("{x:.10e}")).collect();
    println!("{name}: {}", body.join(" "));
}

fn run_solve(args: SolveArgs, threads: usize) -> Result<u8> {
    let solver: SolverName = args.solver.parse().map_err(usage)?;
    let params = solver_params(&args);
    params.validate().map_err(|e| usage(e.to_string()))?;
    let inst = load_custom_instance(&args.instance).map_err(|e| usage(format!("{}: {e}", args.instance.display())))?;

    let result: SolveResult = match &inst.kind {
        InstanceKind::Lasso(l) => {
            let r = run_on_lasso(l, solver, &params, &vec![1.0; l.n()])?;
            print_summary(solver, &r);
            print_vector("x", &r.x_final);
            r
        }
        InstanceKind::BasisPursuit(sp) | InstanceKind::Saddle(sp) => {
            let z0 = SaddlePoint::new(Vector::filled(sp.n(), 1.0), Vector::zeros(sp.q()), Vector::zeros(sp.m()));
            let r = run_on_saddle(sp, solver, &params, &z0, threads > 1)?;
            let z = SaddlePoint::unstack(sp, &r.x_final)?;
            print_summary(solver, &r);
            println!("constraint_violation: {:.6e}", sp.constraint_violation(&z.x, &z.y));
            print_vector("x", &z.x);
            if sp.q() > 0 {
                print_vector("y", &z.y);
            }
            print_vector("lambda", &z.lambda);
            r
        }
    };
    if let Some(path) = &args.trace {
        write_trace(path, &result.trace)?;
    }
    Ok(if result.converged() { 0 } else { EXIT_SOLVER })
}

fn print_summary(solver: SolverName, r: &SolveResult) {
    println!("solver: {solver}");
    println!("status: {}", r.status);
    println!("iterations: {}", r.iterations());
    println!("final_residual: {:.6e}", r.final_residual());
}

fn run_generate(a: GenerateArgs) -> Result<u8> {
    let g = generate_lasso_instance(a.m, a.n, a.seed).map_err(|e| usage(e.to_string()))?;
    let lasso = Lasso::new(g.a, g.b, a.lambda).map_err(|e| usage(e.to_string()))?;
    let kind = match a.kind.as_str() {
        "lasso" => InstanceKind::Lasso(lasso),
        "bp" => InstanceKind::BasisPursuit(lasso.to_basis_pursuit()?),
        other => return Err(usage(format!("unknown instance kind `{other}` (expected lasso or bp)"))),
    };
    save_instance(&InstanceFile { kind, x_true: Some(g.x_true) }, &a.out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|threads| match cli.command {
        Command::Bench(cmd) => run_bench(cmd, threads),
        Command::Solve(args) => run_solve(args, threads),
        Command::Generate(args) => run_generate(args),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_SOLVER)
            }
        }
    }
}
