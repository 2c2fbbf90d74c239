//! Runs a list of solvers on one shared instance, writes one trace CSV per
//! solver and builds the summary table.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use super::instance::{generate_lasso_instance, GeneratedInstance};
use crate::baselines::{closed_form_subsolvers, solve_admm, solve_adlpmm_observed, solve_ista, AdmmParams, IstaParams};
use crate::error::MgviError;
use crate::lasso::Lasso;
use crate::linalg::Vector;
use crate::saddle::{solve_saddle_observed, SaddleMethod, SaddlePoint, SaddleProblem};
use crate::solvers::{
    solve_gem_observed, solve_pga_a1_observed, solve_pga_a2_observed, solve_pga_b1_observed, solve_pga_b2_observed,
    IterationRecord, ObjectiveFn, SolveResult, SolveStatus, SolverParams,
};

/// Entries with magnitude at or below this count as zero when comparing
/// sign patterns.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;

pub const TRACE_HEADER: [&str; 7] = ["k", "beta", "r_k", "alpha_star", "residual_inf", "objective", "wall_time"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverName {
    Ista,
    Gem,
    PgaA1,
    PgaA2,
    PgaB1,
    PgaB2,
    Adlpmm,
    Admm,
}

impl SolverName {
    pub const ALL: [SolverName; 8] = [
        SolverName::Ista,
        SolverName::Gem,
        SolverName::PgaA1,
        SolverName::PgaA2,
        SolverName::PgaB1,
        SolverName::PgaB2,
        SolverName::Adlpmm,
        SolverName::Admm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverName::Ista => "ista",
            SolverName::Gem => "gem",
            SolverName::PgaA1 => "pga-a1",
            SolverName::PgaA2 => "pga-a2",
            SolverName::PgaB1 => "pga-b1",
            SolverName::PgaB2 => "pga-b2",
            SolverName::Adlpmm => "adlpmm",
            SolverName::Admm => "admm",
        }
    }
}

impl fmt::Display for SolverName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        SolverName::ALL
            .into_iter()
            .find(|n| n.as_str() == key)
            .ok_or_else(|| format!("unknown solver `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Lasso,
    BasisPursuit,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub lambda_reg: f64,
    pub solvers: Vec<SolverName>,
    /// Shared by every solver; `tol_inf` and `max_iter` also drive the baselines.
    pub params: SolverParams,
    pub out_dir: Option<PathBuf>,
    /// Evaluate the saddle blocks on separate lanes.
    pub parallel_lanes: bool,
    /// Run the solvers concurrently. Wall times then overlap.
    pub concurrent: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, m: usize, n: usize, seed: u64) -> Self {
        let solvers = match experiment {
            Experiment::Lasso => vec![
                SolverName::Ista,
                SolverName::Gem,
                SolverName::PgaA1,
                SolverName::PgaA2,
                SolverName::PgaB1,
                SolverName::PgaB2,
            ],
            Experiment::BasisPursuit => {
                vec![SolverName::Adlpmm, SolverName::Gem, SolverName::PgaA1, SolverName::PgaB1]
            }
        };
        Self {
            experiment,
            m,
            n,
            seed,
            lambda_reg: 1.0,
            solvers,
            params: SolverParams::default(),
            out_dir: None,
            parallel_lanes: false,
            concurrent: false,
        }
    }

    pub fn validate(&self) -> Result<(), MgviError> {
        if self.m == 0 || self.n == 0 {
            return Err(MgviError::InvalidParameter("m and n must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(MgviError::InvalidParameter("solver list is empty".into()));
        }
        self.params.validate()
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Solver(#[from] MgviError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub solver: SolverName,
    pub status: SolveStatus,
    /// Trace rows.
    pub iterations: usize,
    pub wall_secs: f64,
    pub final_residual: f64,
    pub support_recovered: bool,
    /// `‖x − x_true‖_∞` of the primal part.
    pub max_error: f64,
    /// `‖Ax − b‖_∞` for basis pursuit.
    pub constraint_violation: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub rows: Vec<SummaryRow>,
    pub skipped: Vec<(SolverName, String)>,
}

impl ExperimentReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.status == SolveStatus::Converged)
    }

    pub fn row(&self, name: SolverName) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.solver == name)
    }

    /// Fixed-width summary. With `with_wall = false` the wall-time column is
    /// left out, and the table depends only on the configuration.
    pub fn table(&self, with_wall: bool) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<8} {:<10} {:>10}", "solver", "status", "iterations");
        if with_wall {
            let _ = write!(out, " {:>10}", "wall_s");
        }
        let _ = writeln!(out, " {:>14} {:>8} {:>12} {:>12}", "final_resid", "support", "max_err", "constr_viol");
        for r in &self.rows {
            let status = match &r.status {
                SolveStatus::Stalled(_) => "stalled".to_string(),
                s => s.to_string(),
            };
            let _ = write!(out, "{:<8} {:<10} {:>10}", r.solver.as_str(), status, r.iterations);
            if with_wall {
                let _ = write!(out, " {:>10.3}", r.wall_secs);
            }
            let cv = r.constraint_violation.map_or("-".to_string(), |v| format!("{v:.3e}"));
            let _ = writeln!(
                out,
                " {:>14.6e} {:>8} {:>12.3e} {:>12}",
                r.final_residual, r.support_recovered, r.max_error, cv
            );
        }
        for (s, why) in &self.skipped {
            let _ = writeln!(out, "skipped {s}: {why}");
        }
        out
    }
}

/// Thresholded sign patterns of `x` and `x_true` agree entrywise.
pub fn support_recovered(x: &[f64], x_true: &[f64], threshold: f64) -> bool {
    let sign = |v: f64| if v > threshold { 1 } else if v < -threshold { -1 } else { 0 };
    x.len() == x_true.len() && x.iter().zip(x_true).all(|(a, b)| sign(*a) == sign(*b))
}

pub fn write_trace(path: &Path, trace: &[IterationRecord]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for r in trace {
        w.write_record([
            r.k.to_string(),
            r.beta.to_string(),
            opt(r.r_k),
            opt(r.alpha_star),
            r.residual_inf.to_string(),
            opt(r.objective),
            r.wall_secs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs one solver on a lasso instance from `x0`.
pub fn run_on_lasso(
    lasso: &Lasso,
    solver: SolverName,
    params: &SolverParams,
    x0: &[f64],
) -> Result<SolveResult, MgviError> {
    let objective = |x: &[f64]| lasso.objective(x);
    match solver {
        SolverName::Ista => {
            let ip = IstaParams { step: None, tol_inf: params.tol_inf, max_iter: params.max_iter };
            solve_ista(lasso, &ip, x0)
        }
        SolverName::Adlpmm | SolverName::Admm => {
            Err(MgviError::NotApplicable(format!("{solver} runs on two-block programs, not on the lasso")))
        }
        _ => {
            let p = lasso.to_mgvi()?;
            let mut obs = ObjectiveFn(objective);
            match solver {
                SolverName::Gem => solve_gem_observed(&p, params, x0, &mut obs),
                SolverName::PgaA1 => solve_pga_a1_observed(&p, params, x0, &mut obs),
                SolverName::PgaA2 => solve_pga_a2_observed(&p, params, x0, &mut obs),
                SolverName::PgaB1 => solve_pga_b1_observed(&p, params, x0, &mut obs),
                SolverName::PgaB2 => solve_pga_b2_observed(&p, params, x0, &mut obs),
                _ => unreachable!(),
            }
        }
    }
}

/// Runs one solver on a two-block program. `z0` and the result use the
/// saddle-point sign of `λ`.
pub fn run_on_saddle(
    sp: &SaddleProblem,
    solver: SolverName,
    params: &SolverParams,
    z0: &SaddlePoint,
    parallel_lanes: bool,
) -> Result<SolveResult, MgviError> {
    let (n, q) = (sp.n(), sp.q());
    let objective = |z: &[f64]| sp.objective(&z[..n], &z[n..n + q]).unwrap_or(f64::NAN);
    let mut obs = ObjectiveFn(objective);
    let admm = AdmmParams { tol_succ: params.tol_inf, max_iter: params.max_iter, ..Default::default() };
    let method = match solver {
        SolverName::Gem => SaddleMethod::Gem,
        SolverName::PgaA1 => SaddleMethod::PgaA1,
        SolverName::PgaB1 => SaddleMethod::PgaB1,
        SolverName::Adlpmm => return solve_adlpmm_observed(sp, &admm, z0, &mut obs),
        SolverName::Admm => {
            let (xs, ys) = closed_form_subsolvers(sp)?;
            return solve_admm(sp, &xs, &ys, &admm, z0);
        }
        other => {
            return Err(MgviError::NotApplicable(format!(
                "{other} needs a symmetric or gradient-type operator; the saddle operator is skew"
            )))
        }
    };
    solve_saddle_observed(sp, method, params, z0, parallel_lanes, &mut obs)
}

fn is_inapplicable(e: &MgviError) -> bool {
    matches!(e, MgviError::NotApplicable(_) | MgviError::NoClosedForm(_))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let GeneratedInstance { a, b, x_true } = generate_lasso_instance(cfg.m, cfg.n, cfg.seed)?;
    let lasso = Lasso::new(a, b, cfg.lambda_reg)?;
    let bp = match cfg.experiment {
        Experiment::BasisPursuit => Some(lasso.to_basis_pursuit()?),
        Experiment::Lasso => None,
    };

    let run_one = |solver: SolverName| -> Result<SolveResult, MgviError> {
        match &bp {
            None => run_on_lasso(&lasso, solver, &cfg.params, &vec![1.0; cfg.n]),
            Some(sp) => {
                let z0 = SaddlePoint::new(Vector::filled(cfg.n, 1.0), Vector::zeros(0), Vector::zeros(cfg.m));
                run_on_saddle(sp, solver, &cfg.params, &z0, cfg.parallel_lanes)
            }
        }
    };
    let results: Vec<(SolverName, Result<SolveResult, MgviError>)> = if cfg.concurrent {
        cfg.solvers.par_iter().map(|&s| (s, run_one(s))).collect()
    } else {
        cfg.solvers.iter().map(|&s| (s, run_one(s))).collect()
    };

    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut report = ExperimentReport::default();
    for (solver, result) in results {
        let result = match result {
            Ok(r) => r,
            Err(e) if is_inapplicable(&e) => {
                log::warn!("skipping {solver}: {e}");
                report.skipped.push((solver, e.to_string()));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(dir) = &cfg.out_dir {
            write_trace(&dir.join(format!("trace_{solver}.csv")), &result.trace)?;
        }
        let x = &result.x_final[..cfg.n];
        let max_error = x.iter().zip(&x_true).fold(0.0, |m, (u, v)| f64::max(m, (u - v).abs()));
        let constraint_violation = bp.as_ref().map(|sp| sp.constraint_violation(x, &[]));
        report.rows.push(SummaryRow {
            solver,
            status: result.status.clone(),
            iterations: result.iterations(),
            wall_secs: result.trace.last().map_or(0.0, |r| r.wall_secs),
            final_residual: result.final_residual(),
            support_recovered: support_recovered(x, &x_true, SUPPORT_THRESHOLD),
            max_error,
            constraint_violation,
        });
    }
    if let Some(dir) = &cfg.out_dir {
        std::fs::write(dir.join("summary.txt"), report.table(true))?;
    }
    Ok(report)
}
