//! Proximity and contraction methods.
//!
//! All four share the predictor `x̃ = Prox_{βθ}(x − βF(x))` and move along a
//! direction `d` that makes an acute angle with `x − x*`:
//! `(x − x*)ᵀd ≥ φ(x, x̃)`. The step `α* = φ / ‖d‖²` maximizes the
//! guaranteed decrease in distance to the solution set, and `γ ∈ (0, 2)`
//! relaxes it.

use crate::error::{MgviError, Result};
use crate::linalg::{dot, norm2_sq, sub};
use crate::problem::{MgviProblem, MonotoneOperator};

use super::{run, Method, NoObserver, Observer, SolveResult, SolverParams};

#[derive(Debug, Clone)]
pub struct CorrectorStep {
    pub x_next: Vec<f64>,
    pub alpha_star: f64,
    pub direction: Vec<f64>,
}

fn step_along(x: &[f64], d: &[f64], scale: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi - scale * di).collect()
}

/// PGA-a1 corrector for affine `F(x) = Mx + q`:
/// `d = (I + βMᵀ)(x − x̃)`, `α* = ‖x − x̃‖² / ‖d‖²`.
pub fn pga_a1_step(f: &MonotoneOperator, x: &[f64], x_tilde: &[f64], beta: f64, gamma: f64) -> Result<CorrectorStep> {
    let delta = sub(x, x_tilde);
    let mut mt_delta = vec![0.0; delta.len()];
    if !f.linear_transpose_into(&delta, &mut mt_delta) {
        return Err(MgviError::NotApplicable("PGA-a1 needs an affine operator".into()));
    }
    let direction: Vec<f64> = delta.iter().zip(&mt_delta).map(|(d, m)| d + beta * m).collect();
    let alpha_star = norm2_sq(&delta) / norm2_sq(&direction);
    let x_next = step_along(x, &direction, gamma * alpha_star);
    Ok(CorrectorStep { x_next, alpha_star, direction })
}

/// PGA-a2 corrector for symmetric affine `F`: `d = x − x̃` and
/// `α* = ‖d‖² / ‖d‖²_G` with `G = I + βM`.
pub fn pga_a2_step(f: &MonotoneOperator, x: &[f64], x_tilde: &[f64], beta: f64, gamma: f64) -> Result<CorrectorStep> {
    let delta = sub(x, x_tilde);
    let quad = f
        .quadratic_form(&delta)
        .ok_or_else(|| MgviError::NotApplicable("PGA-a2 needs an affine operator".into()))?;
    let phi = norm2_sq(&delta);
    let alpha_star = phi / (phi + beta * quad);
    let x_next = step_along(x, &delta, gamma * alpha_star);
    Ok(CorrectorStep { x_next, alpha_star, direction: delta })
}

/// PGA-b1 corrector for any monotone `F`:
/// `d = (x − x̃) − β(F(x) − F(x̃))`, `α* = (x − x̃)ᵀd / ‖d‖²`.
pub fn pga_b1_step(x: &[f64], x_tilde: &[f64], fx: &[f64], f_tilde: &[f64], beta: f64, gamma: f64) -> CorrectorStep {
    let delta = sub(x, x_tilde);
    let direction: Vec<f64> = delta
        .iter()
        .zip(fx.iter().zip(f_tilde))
        .map(|(d, (a, b))| d - beta * (a - b))
        .collect();
    let alpha_star = dot(&delta, &direction) / norm2_sq(&direction);
    debug_assert!(alpha_star > 0.5, "alpha* = {alpha_star} with an accepted beta");
    let x_next = step_along(x, &direction, gamma * alpha_star);
    CorrectorStep { x_next, alpha_star, direction }
}

/// `β` with `β‖M‖₂ = 1`.
pub fn default_fixed_beta_a2(f: &MonotoneOperator) -> Result<f64> {
    let m = f
        .symmetric_linear_part()
        .ok_or_else(|| MgviError::NotApplicable("PGA-a2 needs a symmetric affine operator".into()))?;
    let norm = m.spectral_norm();
    Ok(if norm > 0.0 { 1.0 / norm } else { 1.0 })
}

/// Fraction of `1/λ_max(A)` used when PGA-b2 picks its own `β`.
pub const B2_BETA_FRACTION: f64 = 0.95;

pub fn default_fixed_beta_b2(f: &MonotoneOperator) -> Result<f64> {
    let a = f
        .symmetric_linear_part()
        .ok_or_else(|| MgviError::NotApplicable("PGA-b2 needs a symmetric affine operator".into()))?;
    let norm = a.spectral_norm();
    Ok(if norm > 0.0 { B2_BETA_FRACTION / norm } else { 1.0 })
}

fn require_affine(p: &MgviProblem, name: &str) -> Result<()> {
    if p.operator().is_affine() {
        Ok(())
    } else {
        Err(MgviError::NotApplicable(format!("{name} needs an affine operator")))
    }
}

pub fn solve_pga_a1(p: &MgviProblem, params: &SolverParams, x0: &[f64]) -> Result<SolveResult> {
    solve_pga_a1_observed(p, params, x0, &mut NoObserver)
}

pub fn solve_pga_a1_observed(
    p: &MgviProblem,
    params: &SolverParams,
    x0: &[f64],
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    require_affine(p, "PGA-a1")?;
    run(p, params, x0, Method::PgaA1, obs)
}

pub fn solve_pga_a2(p: &MgviProblem, params: &SolverParams, x0: &[f64]) -> Result<SolveResult> {
    solve_pga_a2_observed(p, params, x0, &mut NoObserver)
}

pub fn solve_pga_a2_observed(
    p: &MgviProblem,
    params: &SolverParams,
    x0: &[f64],
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    params.validate()?;
    let beta = match params.fixed_beta {
        Some(b) => {
            if p.operator().symmetric_linear_part().is_none() {
                return Err(MgviError::NotApplicable("PGA-a2 needs a symmetric affine operator".into()));
            }
            b
        }
        None => default_fixed_beta_a2(p.operator())?,
    };
    run(p, params, x0, Method::PgaA2 { beta }, obs)
}

pub fn solve_pga_b1(p: &MgviProblem, params: &SolverParams, x0: &[f64]) -> Result<SolveResult> {
    run(p, params, x0, Method::PgaB1, &mut NoObserver)
}

pub fn solve_pga_b1_observed(
    p: &MgviProblem,
    params: &SolverParams,
    x0: &[f64],
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    run(p, params, x0, Method::PgaB1, obs)
}

pub fn solve_pga_b2(p: &MgviProblem, params: &SolverParams, x0: &[f64]) -> Result<SolveResult> {
    solve_pga_b2_observed(p, params, x0, &mut NoObserver)
}

pub fn solve_pga_b2_observed(
    p: &MgviProblem,
    params: &SolverParams,
    x0: &[f64],
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    params.validate()?;
    let a = p
        .operator()
        .symmetric_linear_part()
        .ok_or_else(|| MgviError::NotApplicable("PGA-b2 needs a symmetric affine operator".into()))?;
    let beta = match params.fixed_beta {
        Some(b) => {
            let lambda_max = a.spectral_norm();
            if b * lambda_max >= 1.0 {
                return Err(MgviError::InvalidParameter(format!(
                    "PGA-b2 needs beta < 1/lambda_max = {:e}, got {b:e}",
                    1.0 / lambda_max
                )));
            }
            b
        }
        None => default_fixed_beta_b2(p.operator())?,
    };
    run(p, params, x0, Method::PgaB2 { beta }, obs)
}
