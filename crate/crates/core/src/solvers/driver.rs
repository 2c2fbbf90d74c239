use std::time::Instant;

use crate::error::{ensure_dims, MgviError, Result};
use crate::linalg::{all_finite, norm_inf, sub, Vector};
use crate::problem::MgviProblem;

use super::adaptive::{adaptive_beta, Prediction};
use super::gem::gem_corrector;
use super::pga::{pga_a1_step, pga_a2_step, pga_b1_step};
use super::residual::residual_given;
use super::{IterationRecord, Observer, SolveResult, SolveStatus, SolverParams, StepView, BETA_GROWTH_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Method {
    Gem,
    PgaA1,
    PgaA2 { beta: f64 },
    PgaB1,
    PgaB2 { beta: f64 },
}

impl Method {
    fn fixed_beta(&self) -> Option<f64> {
        match *self {
            Method::PgaA2 { beta } | Method::PgaB2 { beta } => Some(beta),
            _ => None,
        }
    }
}

/// The predictor-corrector loop shared by all five methods.
pub(crate) fn run(
    p: &MgviProblem,
    params: &SolverParams,
    x0: &[f64],
    method: Method,
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    params.validate()?;
    ensure_dims!(x0.len() == p.dim(), "initial point has {} entries, problem dimension is {}", x0.len(), p.dim());
    if !all_finite(x0) {
        return Err(MgviError::NonFinite("initial point"));
    }

    let start = Instant::now();
    let theta = p.theta();
    let f = p.operator();
    let growth_cap = BETA_GROWTH_CAP * params.beta0;

    let mut x = x0.to_vec();
    let mut fx = f.apply(&x);
    let mut beta = method.fixed_beta().unwrap_or(params.beta0);
    let mut trace = Vec::new();

    let status = 'outer: loop {
        let k = trace.len();
        let residual = norm_inf(&residual_given(theta, &x, &fx, 1.0));
        let mut record = IterationRecord {
            k,
            beta,
            r_k: None,
            alpha_star: None,
            residual_inf: residual,
            objective: obs.objective(&x),
            backtracks: 0,
            wall_secs: 0.0,
        };
        let finish = |mut record: IterationRecord, trace: &mut Vec<IterationRecord>| {
            record.wall_secs = start.elapsed().as_secs_f64();
            trace.push(record);
        };

        if !residual.is_finite() {
            finish(record, &mut trace);
            break SolveStatus::Stalled("non-finite operator value".into());
        }
        if residual < params.tol_inf {
            finish(record, &mut trace);
            break SolveStatus::Converged;
        }
        if k >= params.max_iter {
            finish(record, &mut trace);
            break SolveStatus::MaxIter;
        }

        // predictor
        let (x_tilde, f_tilde, r_k, next_beta) = match method.fixed_beta() {
            Some(b) => {
                let shifted: Vec<f64> = x.iter().zip(&fx).map(|(xi, fi)| xi - b * fi).collect();
                let x_tilde = theta.prox(&shifted, b);
                if x_tilde == x {
                    finish(record, &mut trace);
                    break SolveStatus::Converged;
                }
                (x_tilde, None, None, b)
            }
            None => {
                match adaptive_beta(
                    p,
                    &x,
                    &fx,
                    beta,
                    params.nu,
                    params.mu,
                    params.max_backtracks_per_iter,
                    growth_cap,
                ) {
                    Ok(Prediction::Accepted(step)) => {
                        record.beta = step.beta;
                        record.backtracks = step.backtracks;
                        beta = step.beta;
                        (step.x_tilde, Some(step.f_tilde), Some(step.r_k), step.next_beta)
                    }
                    Ok(Prediction::FixedPoint { beta: b, backtracks }) => {
                        record.beta = b;
                        record.backtracks = backtracks;
                        finish(record, &mut trace);
                        break 'outer SolveStatus::Converged;
                    }
                    Err(MgviError::BacktrackExhausted { backtracks, beta: b }) => {
                        record.beta = b;
                        record.backtracks = backtracks;
                        finish(record, &mut trace);
                        break 'outer SolveStatus::Stalled(format!(
                            "step size search exhausted {backtracks} shrinks at iteration {k}"
                        ));
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        record.r_k = r_k;

        // corrector
        let (x_next, alpha_star) = match method {
            Method::Gem => {
                let ft = f_tilde.as_deref().expect("adaptive predictor yields F(x̃)");
                (gem_corrector(theta, &x, ft, beta), None)
            }
            Method::PgaA1 => {
                let s = pga_a1_step(f, &x, &x_tilde, beta, params.gamma)?;
                (s.x_next, Some(s.alpha_star))
            }
            Method::PgaA2 { .. } => {
                let s = pga_a2_step(f, &x, &x_tilde, beta, params.gamma)?;
                (s.x_next, Some(s.alpha_star))
            }
            Method::PgaB1 => {
                let ft = f_tilde.as_deref().expect("adaptive predictor yields F(x̃)");
                let s = pga_b1_step(&x, &x_tilde, &fx, ft, beta, params.gamma);
                (s.x_next, Some(s.alpha_star))
            }
            Method::PgaB2 { .. } => {
                let delta = sub(&x, &x_tilde);
                let x_next = x.iter().zip(&delta).map(|(xi, di)| xi - params.gamma * di).collect();
                (x_next, None)
            }
        };
        record.alpha_star = alpha_star;
        if !all_finite(&x_next) {
            finish(record, &mut trace);
            break SolveStatus::Stalled(format!("non-finite iterate at iteration {k}"));
        }

        obs.on_step(&StepView { k, beta, x: &x, x_tilde: &x_tilde, x_next: &x_next, r_k, alpha_star });
        finish(record, &mut trace);

        x = x_next;
        fx = f.apply(&x);
        beta = next_beta;
    };

    Ok(SolveResult { x_final: Vector::trusted(x), status, trace })
}
