//! Generalized extragradient method: prox predictor, prox corrector.

use crate::error::Result;
use crate::prox::ProxFunction;
use crate::problem::MgviProblem;

use super::{run, Method, NoObserver, Observer, SolveResult, SolverParams};

/// `x⁺ = Prox_{βθ}(x − βF(x̃))`.
pub fn gem_corrector(theta: &dyn ProxFunction, x: &[f64], f_tilde: &[f64], beta: f64) -> Vec<f64> {
    let shifted: Vec<f64> = x.iter().zip(f_tilde).map(|(xi, fi)| xi - beta * fi).collect();
    theta.prox(&shifted, beta)
}

pub fn solve_gem(p: &MgviProblem, params: &SolverParams, x0: &[f64]) -> Result<SolveResult> {
    run(p, params, x0, Method::Gem, &mut NoObserver)
}

pub fn solve_gem_observed(
    p: &MgviProblem,
    params: &SolverParams,
    x0: &[f64],
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    run(p, params, x0, Method::Gem, obs)
}
