use std::time::Instant;

use crate::error::{MgviError, Result};
use crate::linalg::{all_finite, spectral_norm_estimate, DenseMatrix, Vector};
use crate::saddle::{SaddlePoint, SaddleProblem};
use crate::solvers::{IterationRecord, NoObserver, Observer, SolveResult, SolveStatus, StepView};

use super::{max_abs_change, saddle_stack, AdmmParams, LINEARIZATION_SLACK};

fn gram_bound(m: &DenseMatrix) -> f64 {
    if m.cols() == 0 || m.rows() == 0 {
        return 0.0;
    }
    spectral_norm_estimate(m, 1e-10, 5000).map_or(0.0, |s| s.value * s.value)
}

fn weight(given: Option<f64>, rho: f64, m: &DenseMatrix, name: &str) -> Result<f64> {
    let bound = rho * gram_bound(m);
    match given {
        Some(w) if w + 1e-12 * bound < bound => Err(MgviError::InvalidParameter(format!(
            "{name} = {w} is below ρ·λ_max = {bound}"
        ))),
        Some(w) => Ok(w),
        None if bound > 0.0 => Ok(LINEARIZATION_SLACK * bound),
        None => Ok(1.0),
    }
}

pub fn solve_adlpmm(sp: &SaddleProblem, params: &AdmmParams, z0: &SaddlePoint) -> Result<SolveResult> {
    solve_adlpmm_observed(sp, params, z0, &mut NoObserver)
}

/// Linearized ADMM: each block takes one prox-gradient step on the augmented
/// Lagrangian. Stops when `‖zᵏ⁺¹ − zᵏ‖_∞` drops below `tol_succ`, which is
/// also what the trace's `residual_inf` holds. The observer's objective is
/// evaluated on the stacked `(x, y, λ)` in saddle sign convention.
pub fn solve_adlpmm_observed(
    sp: &SaddleProblem,
    params: &AdmmParams,
    z0: &SaddlePoint,
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    params.validate()?;
    let z0_stacked = z0.stack();
    SaddlePoint::unstack(sp, &z0_stacked)?;
    if !all_finite(&z0_stacked) {
        return Err(MgviError::NonFinite("initial point"));
    }
    let rho = params.rho;
    let alpha = weight(params.alpha_lin, rho, sp.a(), "alpha_lin")?;
    let beta = weight(params.beta_lin, rho, sp.b(), "beta_lin")?;
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
    let mut u = vec![0.0; m];
    let mut grad_x = vec![0.0; x.len()];
    let mut grad_y = vec![0.0; y.len()];
    let mut trace = Vec::new();

    let status = loop {
        let k = trace.len();
        // (a) u = Axᵏ + Byᵏ − c + λᵏ/ρ
        for i in 0..m {
            u[i] = ax[i] + by[i] - c[i] + lambda[i] / rho;
        }
        a.mul_transpose_vec_into(&u, &mut grad_x);
        let shifted: Vec<f64> = x.iter().zip(&grad_x).map(|(xi, gi)| xi - rho / alpha * gi).collect();
        let x_next = sp.theta1.prox(&shifted, 1.0 / alpha);
        a.mul_vec_into(&x_next, &mut ax);
        // (b) with the fresh x
        let y_next = if y.is_empty() {
            Vec::new()
        } else {
            for i in 0..m {
                u[i] = ax[i] + by[i] - c[i] + lambda[i] / rho;
            }
            b.mul_transpose_vec_into(&u, &mut grad_y);
            let shifted: Vec<f64> = y.iter().zip(&grad_y).map(|(yi, gi)| yi - rho / beta * gi).collect();
            let y_next = sp.theta2.prox(&shifted, 1.0 / beta);
            b.mul_vec_into(&y_next, &mut by);
            y_next
        };
        // (c)
        let lambda_next: Vec<f64> = (0..m).map(|i| lambda[i] + rho * (ax[i] + by[i] - c[i])).collect();

        let change = max_abs_change(&x_next, &x)
            .max(max_abs_change(&y_next, &y))
            .max(max_abs_change(&lambda_next, &lambda));
        let before = saddle_stack(&x, &y, &lambda);
        let after = saddle_stack(&x_next, &y_next, &lambda_next);
        obs.on_step(&StepView { k, beta: rho, x: &before, x_tilde: &after, x_next: &after, r_k: None, alpha_star: None });
        x = x_next;
        y = y_next;
        lambda = lambda_next;
        trace.push(IterationRecord {
            k,
            beta: rho,
            r_k: None,
            alpha_star: None,
            residual_inf: change,
            objective: obs.objective(&after),
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
