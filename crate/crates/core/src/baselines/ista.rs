use std::time::Instant;

use crate::error::{ensure_dims, MgviError, Result};
use crate::lasso::Lasso;
use crate::linalg::{all_finite, norm2_sq, spectral_norm_estimate, Vector};
use crate::prox::soft_threshold;
use crate::solvers::{IterationRecord, NoObserver, Observer, SolveResult, SolveStatus, StepView};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IstaParams {
    /// Gradient step; [`default_ista_step`] when absent.
    pub step: Option<f64>,
    pub tol_inf: f64,
    pub max_iter: usize,
}

impl Default for IstaParams {
    fn default() -> Self {
        Self { step: None, tol_inf: 1e-6, max_iter: 20_000 }
    }
}

/// `0.99 / λ_max(AᵀA)` from a power-iteration estimate.
pub fn default_ista_step(lasso: &Lasso) -> Result<f64> {
    Ok(0.99 / lipschitz(lasso)?)
}

fn lipschitz(lasso: &Lasso) -> Result<f64> {
    let s = spectral_norm_estimate(lasso.a(), 1e-10, 5000)?;
    Ok(s.value * s.value)
}

pub fn solve_ista(lasso: &Lasso, params: &IstaParams, x0: &[f64]) -> Result<SolveResult> {
    solve_ista_observed(lasso, params, x0, &mut NoObserver)
}

/// Proximal gradient `x⁺ = Prox_{tθ}(x − t·Aᵀ(Ax − b))`, stopped on the
/// natural residual `‖x − Prox_θ(x − F(x))‖_∞`. The trace objective is the
/// lasso objective; the observer only sees steps.
pub fn solve_ista_observed(
    lasso: &Lasso,
    params: &IstaParams,
    x0: &[f64],
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    ensure_dims!(x0.len() == lasso.n(), "initial point has {} entries, expected {}", x0.len(), lasso.n());
    if !all_finite(x0) {
        return Err(MgviError::NonFinite("initial point"));
    }
    if !(params.tol_inf > 0.0) || params.max_iter == 0 {
        return Err(MgviError::InvalidParameter("tolerance and max_iter must be positive".into()));
    }
    let step = match params.step {
        Some(t) => {
            let l = lipschitz(lasso).unwrap_or(0.0);
            // a hair of slack for the power-iteration estimate
            if !(t > 0.0) || (l > 0.0 && t * l > 1.0 + 1e-9) {
                return Err(MgviError::InvalidParameter(format!(
                    "ISTA step {t} exceeds 1/λ_max(AᵀA) = {}",
                    1.0 / l
                )));
            }
            t
        }
        // A = 0: any step works
        None => default_ista_step(lasso).unwrap_or(1.0),
    };

    let start = Instant::now();
    let a = lasso.a();
    let lambda = lasso.lambda();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; a.rows()];
    let mut g = vec![0.0; x.len()];
    let mut trace = Vec::new();

    let status = loop {
        let k = trace.len();
        a.mul_vec_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(lasso.b()) {
            *ri -= bi;
        }
        a.mul_transpose_vec_into(&r, &mut g);
        let residual = x
            .iter()
            .zip(&g)
            .fold(0.0, |m, (xi, gi)| f64::max(m, (xi - soft_threshold(xi - gi, lambda)).abs()));
        let objective = 0.5 * norm2_sq(&r) + lambda * x.iter().map(|v| v.abs()).sum::<f64>();
        trace.push(IterationRecord {
            k,
            beta: step,
            r_k: None,
            alpha_star: None,
            residual_inf: residual,
            objective: Some(objective),
            backtracks: 0,
            wall_secs: start.elapsed().as_secs_f64(),
        });
        if !residual.is_finite() {
            break SolveStatus::Stalled("non-finite gradient".into());
        }
        if residual < params.tol_inf {
            break SolveStatus::Converged;
        }
        if k >= params.max_iter {
            break SolveStatus::MaxIter;
        }
        let x_next: Vec<f64> =
            x.iter().zip(&g).map(|(xi, gi)| soft_threshold(xi - step * gi, step * lambda)).collect();
        obs.on_step(&StepView { k, beta: step, x: &x, x_tilde: &x_next, x_next: &x_next, r_k: None, alpha_star: None });
        x = x_next;
        if let Some(last) = trace.last_mut() {
            last.wall_secs = start.elapsed().as_secs_f64();
        }
    };
    Ok(SolveResult { x_final: Vector::trusted(x), status, trace })
}
