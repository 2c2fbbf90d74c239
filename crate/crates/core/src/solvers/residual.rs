use crate::error::{ensure_dims, MgviError, Result};
use crate::linalg::{norm_inf, Vector};
use crate::prox::ProxFunction;
use crate::problem::MgviProblem;

/// Natural residual `e(x, β) = x − Prox_{βθ}(x − βF(x))`, zero exactly at solutions.
pub fn residual(p: &MgviProblem, x: &[f64], beta: f64) -> Result<Vector> {
    ensure_dims!(x.len() == p.dim(), "point has {} entries, problem dimension is {}", x.len(), p.dim());
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(MgviError::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let fx = p.operator().apply(x);
    Vector::new(residual_given(p.theta(), x, &fx, beta))
}

/// `‖e(x, 1)‖_∞`, the stopping measure.
pub fn residual_inf(p: &MgviProblem, x: &[f64]) -> Result<f64> {
    residual(p, x, 1.0).map(|e| norm_inf(&e))
}

/// `e(x, β)` when `F(x)` is already known.
pub(crate) fn residual_given(theta: &dyn ProxFunction, x: &[f64], fx: &[f64], beta: f64) -> Vec<f64> {
    let shifted: Vec<f64> = x.iter().zip(fx).map(|(xi, fi)| xi - beta * fi).collect();
    let p = theta.prox(&shifted, beta);
    x.iter().zip(&p).map(|(a, b)| a - b).collect()
}
