//! Predictor-corrector solvers for `MGVI(θ, F)`.
//!
//! Every method shares one predictor, `x̃ = Prox_{βθ}(x − βF(x))`, and
//! differs in the corrector:
//!
//! | method  | corrector                                      | operator needed        |
//! |---------|------------------------------------------------|------------------------|
//! | GEM     | `Prox_{βθ}(x − βF(x̃))`                         | any monotone           |
//! | PGA-a1  | `x − γα*(I + βMᵀ)(x − x̃)`                      | affine, `M ⪰ 0`        |
//! | PGA-a2  | `x − γα*(x − x̃)`, `α*` in the `I + βM` norm    | affine, `M` symmetric  |
//! | PGA-b1  | `x − γα*[(x − x̃) − β(F(x) − F(x̃))]`            | any monotone           |
//! | PGA-b2  | `x − γ(x − x̃)`                                 | affine, `A` symmetric  |
//!
//! GEM, PGA-a1 and PGA-b1 pick `β` with the self-adaptive rule in
//! [`adaptive_beta`]; PGA-a2 and PGA-b2 run with a fixed `β`.

mod adaptive;
mod driver;
mod gem;
mod pga;
mod residual;

use std::fmt;

pub use adaptive::{adaptive_beta, AdaptiveStep, Prediction};
pub use gem::{gem_corrector, solve_gem, solve_gem_observed};
pub use pga::{
    default_fixed_beta_a2, default_fixed_beta_b2, pga_a1_step, pga_a2_step, pga_b1_step, solve_pga_a1,
    solve_pga_a1_observed, solve_pga_a2, solve_pga_a2_observed, solve_pga_b1, solve_pga_b1_observed,
    solve_pga_b2, solve_pga_b2_observed, CorrectorStep,
};
pub use residual::{residual, residual_inf};

pub(crate) use driver::{run, Method};

use crate::error::{MgviError, Result};
use crate::linalg::Vector;

/// Cap on `β` growth, relative to `β⁰`, keeping `{βᵏ}` bounded.
pub const BETA_GROWTH_CAP: f64 = 1e6;

/// Shrink factor applied when `r_k > ν` (before the `min{1, 1/r_k}` term).
pub const BETA_SHRINK: f64 = 2.0 / 3.0;

/// Growth factor applied when `r_k ≤ μ`.
pub const BETA_GROW: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Acceptance bound on `r_k`, in `(0, 1)`.
    pub nu: f64,
    /// Growth trigger, in `(0, ν)`.
    pub mu: f64,
    /// Relaxation, in `(0, 2)`.
    pub gamma: f64,
    pub beta0: f64,
    /// `β` for the fixed-step methods (PGA-a2, PGA-b2). Chosen from the
    /// operator norm when absent.
    pub fixed_beta: Option<f64>,
    pub max_iter: usize,
    /// Stop once `‖e(xᵏ, 1)‖_∞` drops below this.
    pub tol_inf: f64,
    pub max_backtracks_per_iter: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            nu: 0.9,
            mu: 0.4,
            gamma: 1.9,
            beta0: 1.0,
            fixed_beta: None,
            max_iter: 20_000,
            tol_inf: 1e-6,
            max_backtracks_per_iter: 60,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MgviError::InvalidParameter(msg));
        if !(0.0 < self.mu && self.mu < self.nu && self.nu < 1.0) {
            return bad(format!("need 0 < mu < nu < 1, got mu = {}, nu = {}", self.mu, self.nu));
        }
        if !(0.0 < self.gamma && self.gamma < 2.0) {
            return bad(format!("gamma must lie in (0, 2), got {}", self.gamma));
        }
        if !(self.beta0 > 0.0 && self.beta0.is_finite()) {
            return bad(format!("beta0 must be positive, got {}", self.beta0));
        }
        if let Some(b) = self.fixed_beta {
            if !(b > 0.0 && b.is_finite()) {
                return bad(format!("fixed beta must be positive, got {b}"));
            }
        }
        if self.max_iter == 0 || self.max_backtracks_per_iter == 0 {
            return bad("max_iter and max_backtracks_per_iter must be positive".into());
        }
        if !(self.tol_inf > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol_inf));
        }
        Ok(())
    }
}

/// One row of a solver trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// `βᵏ` accepted for this iteration.
    pub beta: f64,
    pub r_k: Option<f64>,
    pub alpha_star: Option<f64>,
    /// The stopping measure at `xᵏ`: `‖e(xᵏ, 1)‖_∞` for the predictor-corrector
    /// methods and ISTA, the successive-iterate change for ADMM-type baselines.
    pub residual_inf: f64,
    pub objective: Option<f64>,
    pub backtracks: usize,
    /// Seconds since the solver started.
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Stalled(String),
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStatus::Converged => f.write_str("converged"),
            SolveStatus::MaxIter => f.write_str("max_iter"),
            SolveStatus::Stalled(why) => write!(f, "stalled ({why})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vector,
    pub status: SolveStatus,
    pub trace: Vec<IterationRecord>,
}

impl SolveResult {
    /// Number of trace rows, which is the iteration count reported everywhere.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::INFINITY, |r| r.residual_inf)
    }
}

/// Everything a solver knows about one accepted iteration.
#[derive(Debug)]
pub struct StepView<'a> {
    pub k: usize,
    pub beta: f64,
    pub x: &'a [f64],
    pub x_tilde: &'a [f64],
    pub x_next: &'a [f64],
    pub r_k: Option<f64>,
    pub alpha_star: Option<f64>,
}

/// Hooks into a solver run. Both methods default to doing nothing.
pub trait Observer {
    /// Objective value recorded in the trace; solvers never use it.
    fn objective(&mut self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn on_step(&mut self, _step: &StepView<'_>) {}
}

/// Observer that does nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl Observer for NoObserver {}

/// Adapts a closure into an objective-reporting [`Observer`].
pub struct ObjectiveFn<F>(pub F);

impl<F: FnMut(&[f64]) -> f64> Observer for ObjectiveFn<F> {
    fn objective(&mut self, x: &[f64]) -> Option<f64> {
        Some((self.0)(x))
    }
}
