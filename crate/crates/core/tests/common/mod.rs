#![allow(dead_code)]

use mgvi::baselines::{solve_ista, IstaParams};
use mgvi::bench::generate_lasso_instance;
use mgvi::lasso::Lasso;
use mgvi::solvers::{Observer, StepView};

pub fn seeded_lasso(m: usize, n: usize, seed: u64, lambda: f64) -> (Lasso, Vec<f64>) {
    let g = generate_lasso_instance(m, n, seed).unwrap();
    (Lasso::new(g.a, g.b, lambda).unwrap(), g.x_true)
}

/// High-accuracy lasso solution from a long ISTA run.
pub fn reference_solution(lasso: &Lasso, tol: f64) -> Vec<f64> {
    let params = IstaParams { step: None, tol_inf: tol, max_iter: 2_000_000 };
    let r = solve_ista(lasso, &params, &vec![0.0; lasso.n()]).unwrap();
    assert!(r.converged(), "reference solve did not converge: {}", r.status);
    r.x_final.into_inner()
}

#[derive(Debug, Clone)]
pub struct Step {
    pub k: usize,
    pub beta: f64,
    pub x: Vec<f64>,
    pub x_tilde: Vec<f64>,
    pub x_next: Vec<f64>,
    pub r_k: Option<f64>,
    pub alpha_star: Option<f64>,
}

#[derive(Default)]
pub struct Recorder {
    pub steps: Vec<Step>,
}

impl Observer for Recorder {
    fn on_step(&mut self, s: &StepView<'_>) {
        self.steps.push(Step {
            k: s.k,
            beta: s.beta,
            x: s.x.to_vec(),
            x_tilde: s.x_tilde.to_vec(),
            x_next: s.x_next.to_vec(),
            r_k: s.r_k,
            alpha_star: s.alpha_star,
        });
    }
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

pub fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}
