use crate::error::{MgviError, Result};
use crate::linalg::{norm2, sub};
use crate::problem::MgviProblem;

use super::{BETA_GROW, BETA_SHRINK};

/// An accepted predictor step.
#[derive(Debug, Clone)]
pub struct AdaptiveStep {
    pub beta: f64,
    /// `β‖F(x) − F(x̃)‖ / ‖x − x̃‖` at the accepted `β`; never above `ν`.
    pub r_k: f64,
    /// `β` to start the next iteration with.
    pub next_beta: f64,
    pub backtracks: usize,
    pub x_tilde: Vec<f64>,
    pub f_tilde: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Prediction {
    Accepted(AdaptiveStep),
    /// `x̃ = x` exactly at this `β`, so `x` already solves the problem.
    FixedPoint { beta: f64, backtracks: usize },
}

/// Self-adaptive predictor.
///
/// Computes `x̃ = Prox_{βθ}(x − βF(x))` and shrinks
/// `β ← (2/3)·β·min{1, 1/r_k}` until `r_k ≤ ν`. The next iteration's `β`
/// grows by 1.5 when `r_k ≤ μ`, capped at `growth_cap`.
#[allow(clippy::too_many_arguments)]
pub fn adaptive_beta(
    p: &MgviProblem,
    x: &[f64],
    fx: &[f64],
    beta: f64,
    nu: f64,
    mu: f64,
    max_backtracks: usize,
    growth_cap: f64,
) -> Result<Prediction> {
    let theta = p.theta();
    let f = p.operator();
    let n = x.len();
    let mut beta = beta;
    let mut backtracks = 0;
    let mut shifted = vec![0.0; n];
    let mut x_tilde = vec![0.0; n];
    loop {
        for ((s, xi), fi) in shifted.iter_mut().zip(x).zip(fx) {
            *s = xi - beta * fi;
        }
        theta.prox_into(&shifted, beta, &mut x_tilde);
        let delta = sub(x, &x_tilde);
        let delta_norm = norm2(&delta);
        if delta_norm == 0.0 {
            return Ok(Prediction::FixedPoint { beta, backtracks });
        }
        let f_tilde = f.apply(&x_tilde);
        let r_k = beta * norm2(&sub(fx, &f_tilde)) / delta_norm;
        if r_k > nu {
            if backtracks == max_backtracks {
                return Err(MgviError::BacktrackExhausted { backtracks, beta });
            }
            beta *= BETA_SHRINK * (1.0 / r_k).min(1.0);
            backtracks += 1;
            continue;
        }
        let next_beta = if r_k <= mu { (BETA_GROW * beta).min(growth_cap) } else { beta };
        return Ok(Prediction::Accepted(AdaptiveStep { beta, r_k, next_beta, backtracks, x_tilde, f_tilde }));
    }
}
