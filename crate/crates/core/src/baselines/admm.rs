use std::sync::Arc;
use std::time::Instant;

use crate::error::{MgviError, Result};
use crate::linalg::{all_finite, Vector};
use crate::prox::ProxFunction;
use crate::saddle::{SaddlePoint, SaddleProblem};
use crate::solvers::{IterationRecord, SolveResult, SolveStatus};

use super::{max_abs_change, saddle_stack, AdmmParams};

/// Exact minimizer of `θ(u) + (ρ/2)‖Mu − w‖²` for one block `(θ, M)`.
pub trait SubproblemSolver: Send + Sync {
    fn solve_into(&self, w: &[f64], rho: f64, out: &mut [f64]);
}

/// The block matrix is `s·I`, so the subproblem is the prox
/// `Prox_{θ/(ρs²)}(w/s)`.
#[derive(Debug, Clone)]
pub struct ScaledIdentitySubsolver {
    theta: Arc<dyn ProxFunction>,
    scale: f64,
}

impl ScaledIdentitySubsolver {
    pub fn new(theta: Arc<dyn ProxFunction>, scale: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(MgviError::NoClosedForm(format!("block scale {scale} does not determine the block")));
        }
        Ok(Self { theta, scale })
    }
}

impl SubproblemSolver for ScaledIdentitySubsolver {
    fn solve_into(&self, w: &[f64], rho: f64, out: &mut [f64]) {
        let s = self.scale;
        let v: Vec<f64> = w.iter().map(|wi| wi / s).collect();
        self.theta.prox_into(&v, 1.0 / (rho * s * s), out);
    }
}

fn block_subsolver(theta: &Arc<dyn ProxFunction>, m: &crate::linalg::DenseMatrix, name: &str) -> Result<ScaledIdentitySubsolver> {
    if m.cols() == 0 {
        return ScaledIdentitySubsolver::new(theta.clone(), 1.0);
    }
    match m.as_scaled_identity() {
        Some(s) => ScaledIdentitySubsolver::new(theta.clone(), s),
        None => Err(MgviError::NoClosedForm(format!("{name} is not a nonzero multiple of the identity"))),
    }
}

/// Closed-form subproblem solvers when `A` and `B` are both multiples of the
/// identity (an empty `y` block counts as trivially solvable).
pub fn closed_form_subsolvers(sp: &SaddleProblem) -> Result<(ScaledIdentitySubsolver, ScaledIdentitySubsolver)> {
    Ok((block_subsolver(&sp.theta1, sp.a(), "A")?, block_subsolver(&sp.theta2, sp.b(), "B")?))
}

/// Classic ADMM. `z0` and the returned iterate use the saddle-point sign of
/// `λ`. The trace's `residual_inf` is `‖zᵏ⁺¹ − zᵏ‖_∞`, the stopping measure.
pub fn solve_admm(
    sp: &SaddleProblem,
    x_sub: &dyn SubproblemSolver,
    y_sub: &dyn SubproblemSolver,
    params: &AdmmParams,
    z0: &SaddlePoint,
) -> Result<SolveResult> {
    params.validate()?;
    let z0_stacked = z0.stack();
    SaddlePoint::unstack(sp, &z0_stacked)?;
    if !all_finite(&z0_stacked) {
        return Err(MgviError::NonFinite("initial point"));
    }
    let rho = params.rho;
    let (a, b, c) = (sp.a(), sp.b(), sp.c());
    let m = sp.m();

    let start = Instant::now();
    let mut x = z0.x.to_vec();
    let mut y = z0.y.to_vec();
    let mut lambda: Vec<f64> = z0.lambda.iter().map(|l| -l).collect();
    let mut ax = vec![0.0; m];
    let mut by = vec![0.0; m];
    a.mul_vec_into(&x, &mut ax);
    b.mul_vec_into(&y, &mut by);
    let mut w = vec![0.0; m];
    let mut trace = Vec::new();

    let status = loop {
        let k = trace.len();
        // (a) x-block with y, λ frozen
        for i in 0..m {
            w[i] = c[i] - by[i] - lambda[i] / rho;
        }
        let mut x_next = vec![0.0; x.len()];
        x_sub.solve_into(&w, rho, &mut x_next);
        a.mul_vec_into(&x_next, &mut ax);
        // (b) y-block with the fresh x
        let mut y_next = vec![0.0; y.len()];
        if !y.is_empty() {
            for i in 0..m {
                w[i] = c[i] - ax[i] - lambda[i] / rho;
            }
            y_sub.solve_into(&w, rho, &mut y_next);
            b.mul_vec_into(&y_next, &mut by);
        }
        // (c) multiplier
        let lambda_next: Vec<f64> = (0..m).map(|i| lambda[i] + rho * (ax[i] + by[i] - c[i])).collect();

        let change = max_abs_change(&x_next, &x)
            .max(max_abs_change(&y_next, &y))
            .max(max_abs_change(&lambda_next, &lambda));
        x = x_next;
        y = y_next;
        lambda = lambda_next;
        trace.push(IterationRecord {
            k,
            beta: rho,
            r_k: None,
            alpha_star: None,
            residual_inf: change,
            objective: sp.objective(&x, &y),
            backtracks: 0,
            wall_secs: start.elapsed().as_secs_f64(),
        });
        if !change.is_finite() {
            break SolveStatus::Stalled("non-finite iterate".into());
        }
        if change < params.tol_succ {
            break SolveStatus::Converged;
        }
        if trace.len() >= params.max_iter {
            break SolveStatus::MaxIter;
        }
    };
    Ok(SolveResult { x_final: Vector::trusted(saddle_stack(&x, &y, &lambda)), status, trace })
}
