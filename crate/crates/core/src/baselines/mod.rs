//! Reference solvers used for comparison: ISTA for the lasso, and ADMM and
//! its linearized variant AD-LPMM for two-block programs.
//!
//! The ADMM-type methods use the multiplier sign of the augmented
//! Lagrangian `θ₁ + θ₂ + λᵀ(Ax + By − c) + (ρ/2)‖Ax + By − c‖²`, which is the
//! negative of the saddle-point `λ`. Their reported iterates are converted
//! to the saddle convention so limits can be compared directly.

mod adlpmm;
mod admm;
mod ista;

pub use adlpmm::{solve_adlpmm, solve_adlpmm_observed};
pub use admm::{closed_form_subsolvers, solve_admm, ScaledIdentitySubsolver, SubproblemSolver};
pub use ista::{default_ista_step, solve_ista, solve_ista_observed, IstaParams};

use crate::error::{MgviError, Result};

/// Settings shared by ADMM and AD-LPMM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmParams {
    /// Penalty `ρ`.
    pub rho: f64,
    /// AD-LPMM proximal weight on `x`; `1.01·ρ·λ_max(AᵀA)` when absent.
    pub alpha_lin: Option<f64>,
    /// AD-LPMM proximal weight on `y`; `1.01·ρ·λ_max(BᵀB)` when absent.
    pub beta_lin: Option<f64>,
    pub max_iter: usize,
    /// Stop once the successive-iterate change has `∞`-norm below this.
    pub tol_succ: f64,
}

/// Slack applied to the spectral bounds when AD-LPMM picks its own weights.
pub const LINEARIZATION_SLACK: f64 = 1.01;

impl Default for AdmmParams {
    fn default() -> Self {
        Self { rho: 1.0, alpha_lin: None, beta_lin: None, max_iter: 20_000, tol_succ: 1e-6 }
    }
}

impl AdmmParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.rho) {
            return Err(MgviError::InvalidParameter(format!("rho must be positive, got {}", self.rho)));
        }
        for (name, v) in [("alpha_lin", self.alpha_lin), ("beta_lin", self.beta_lin)] {
            if let Some(v) = v {
                if !positive(v) {
                    return Err(MgviError::InvalidParameter(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.max_iter == 0 {
            return Err(MgviError::InvalidParameter("max_iter must be positive".into()));
        }
        if !(self.tol_succ > 0.0) {
            return Err(MgviError::InvalidParameter(format!("tolerance must be positive, got {}", self.tol_succ)));
        }
        Ok(())
    }
}

/// Stacks `(x, y, −λ)`, turning an augmented-Lagrangian multiplier into the
/// saddle-point one.
pub(crate) fn saddle_stack(x: &[f64], y: &[f64], lambda: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(x.len() + y.len() + lambda.len());
    z.extend_from_slice(x);
    z.extend_from_slice(y);
    z.extend(lambda.iter().map(|l| -l));
    z
}

pub(crate) fn max_abs_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| f64::max(m, (u - v).abs()))
}
