//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion, with
//! the supporting numbers indented underneath, then asserts.
//!
//! One sub-check is known to be unattainable: lasso entries within 1e-3 of
//! ±1 at λ = 1. The lasso minimizer itself is biased by λ(A_SᵀA_S)⁻¹ sign(x_S)
//! on the support, which exceeds 1e-3 on these instances. That line is
//! reported as FAIL, and the test only tolerates it when every solver's error
//! equals that analytic bias.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use mgvi::bench::{
    generate_lasso_instance, run_experiment, run_on_lasso, run_on_saddle, Experiment, ExperimentConfig,
    NormalStream, SolverName,
};
use mgvi::baselines::{solve_ista, IstaParams};
use mgvi::lasso::Lasso;
use mgvi::linalg::{norm2, norm2_sq, DenseMatrix, Vector};
use mgvi::problem::MgviProblem;
use mgvi::prox::{HalfSquaredDistance, L1Norm};
use mgvi::saddle::{saddle_step_sizes, solve_saddle_observed, SaddleMethod, SaddlePoint, SaddleProblem};
use mgvi::solvers::{
    residual, solve_gem_observed, solve_pga_a1_observed, solve_pga_a2_observed, solve_pga_b1_observed,
    solve_pga_b2_observed, Observer, SolveStatus, SolverParams, StepView,
};

const SEEDS: [u64; 3] = [1, 2, 3];
const LASSO_TARGETS: [(SolverName, usize); 6] = [
    (SolverName::Ista, 1739),
    (SolverName::Gem, 1682),
    (SolverName::PgaA1, 1816),
    (SolverName::PgaA2, 822),
    (SolverName::PgaB1, 1157),
    (SolverName::PgaB2, 1085),
];
const BP_TARGETS: [(SolverName, usize); 2] = [(SolverName::PgaA1, 225), (SolverName::PgaB1, 226)];
const COUNT_FACTOR: f64 = 3.0;
const ENTRY_TOL: f64 = 1e-3;
const ENTRY_CHECK: &str = "entries within 1e-3 of +-1";

#[derive(Default)]
struct Outcome {
    checks: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

/// `(β, x, x̃, x_next, r_k, α*)` of one accepted step.
type Step = (f64, Vec<f64>, Vec<f64>, Vec<f64>, Option<f64>, Option<f64>);

#[derive(Default)]
struct Recorder {
    steps: Vec<Step>,
}

impl Observer for Recorder {
    fn on_step(&mut self, s: &StepView<'_>) {
        self.steps.push((s.beta, s.x.to_vec(), s.x_tilde.to_vec(), s.x_next.to_vec(), s.r_k, s.alpha_star));
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| f64::max(m, (u - v).abs()))
}

fn seeded_lasso(m: usize, n: usize, seed: u64, lambda: f64) -> (Lasso, Vec<f64>) {
    let g = generate_lasso_instance(m, n, seed).unwrap();
    (Lasso::new(g.a, g.b, lambda).unwrap(), g.x_true)
}

fn ista_oracle(lasso: &Lasso, tol: f64) -> Vec<f64> {
    let params = IstaParams { step: None, tol_inf: tol, max_iter: 5_000_000 };
    let r = solve_ista(lasso, &params, &vec![0.0; lasso.n()]).unwrap();
    assert!(r.converged(), "oracle did not converge: {}", r.status);
    r.x_final.into_inner()
}

fn within_factor(count: usize, target: usize) -> bool {
    let r = count as f64 / target as f64;
    (1.0 / COUNT_FACTOR..=COUNT_FACTOR).contains(&r)
}

/// Solves the small SPD system `g v = s` by Cholesky.
fn spd_solve(g: &[Vec<f64>], s: &[f64]) -> Vec<f64> {
    let k = s.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let acc: f64 = (0..j).map(|p| l[i][p] * l[j][p]).sum();
            if i == j {
                l[i][i] = (g[i][i] - acc).sqrt();
            } else {
                l[i][j] = (g[i][j] - acc) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        y[i] = (s[i] - (0..i).map(|p| l[i][p] * y[p]).sum::<f64>()) / l[i][i];
    }
    let mut v = vec![0.0; k];
    for i in (0..k).rev() {
        v[i] = (y[i] - (i + 1..k).map(|p| l[p][i] * v[p]).sum::<f64>()) / l[i][i];
    }
    v
}

/// Largest entry of `λ(A_SᵀA_S)⁻¹ sign(x_S)`: the exact distance of the lasso
/// minimizer from a noiseless truth when the support is recovered.
fn lasso_support_bias(a: &DenseMatrix, x_true: &[f64], lambda: f64) -> f64 {
    let support: Vec<usize> = (0..x_true.len()).filter(|&j| x_true[j] != 0.0).collect();
    let g: Vec<Vec<f64>> = support
        .iter()
        .map(|&i| support.iter().map(|&j| (0..a.rows()).map(|r| a.get(r, i) * a.get(r, j)).sum()).collect())
        .collect();
    let s: Vec<f64> = support.iter().map(|&j| x_true[j].signum()).collect();
    spd_solve(&g, &s).iter().fold(0.0, |m, v| f64::max(m, (lambda * v).abs()))
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::default();
    let mut counts: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for seed in SEEDS {
        let mut cfg = ExperimentConfig::new(Experiment::Lasso, 1000, 1100, seed);
        cfg.concurrent = true;
        let t = Instant::now();
        let report = run_experiment(&cfg).unwrap();
        let g = generate_lasso_instance(1000, 1100, seed).unwrap();
        let bias = lasso_support_bias(&g.a, &g.x_true, cfg.lambda_reg);
        out.note(format!("seed {seed} ({:.1} s), analytic lasso bias {bias:.4e}", t.elapsed().as_secs_f64()));
        for (name, target) in LASSO_TARGETS {
            let r = report.row(name).unwrap();
            out.note(format!(
                "  {:<7} {:>5} it (target {target:>4})  {:<9}  support {}  max_err {:.4e}",
                name.as_str(),
                r.iterations,
                r.status.to_string(),
                r.support_recovered,
                r.max_error
            ));
            counts.entry(name.as_str()).or_default().push(r.iterations);
            out.check(format!("seed {seed} {name} converged"), r.status == SolveStatus::Converged);
            out.check(format!("seed {seed} {name} support and signs"), r.support_recovered);
            out.check(format!("seed {seed} {name} count within x3"), within_factor(r.iterations, target));
            out.check(format!("seed {seed} {name} {ENTRY_CHECK}"), r.max_error <= ENTRY_TOL);
            out.check(format!("seed {seed} {name} error equals analytic bias"), (r.max_error - bias).abs() <= 1e-4);
        }
        let a2 = report.row(SolverName::PgaA2).unwrap().iterations;
        let smallest = report.rows.iter().all(|r| r.iterations >= a2);
        out.check(format!("seed {seed} pga-a2 smallest"), smallest);
    }
    for (name, c) in &counts {
        out.note(format!("{name:<7} counts {c:?}"));
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::default();
    for seed in SEEDS {
        let mut cfg = ExperimentConfig::new(Experiment::BasisPursuit, 1000, 1100, seed);
        cfg.concurrent = true;
        let report = run_experiment(&cfg).unwrap();
        for r in &report.rows {
            out.note(format!(
                "seed {seed} {:<7} {:>5} it  {:<9}  support {}  max_err {:.3e}  constr {:.3e}",
                r.solver.as_str(),
                r.iterations,
                r.status.to_string(),
                r.support_recovered,
                r.max_error,
                r.constraint_violation.unwrap_or(f64::NAN)
            ));
            out.check(format!("seed {seed} {} converged", r.solver), r.status == SolveStatus::Converged);
            out.check(format!("seed {seed} {} recovers x_true", r.solver), r.support_recovered && r.max_error <= 1e-3);
        }
        let gem = report.row(SolverName::Gem).unwrap().iterations;
        let ad = report.row(SolverName::Adlpmm).unwrap().iterations;
        out.check(format!("seed {seed} adlpmm >= 5 x gem ({ad} vs {gem})"), ad >= 5 * gem);
        for (name, target) in BP_TARGETS {
            let it = report.row(name).unwrap().iterations;
            out.check(format!("seed {seed} {name} within x3 of {target}"), within_factor(it, target));
        }
    }
    out
}

/// `vᵀ(I ± βAᵀA)v`
fn g_norm_sq(lasso: &Lasso, v: &[f64], beta: f64, sign: f64) -> f64 {
    let mut av = vec![0.0; lasso.a().rows()];
    lasso.a().mul_vec_into(v, &mut av);
    norm2_sq(v) + sign * beta * norm2_sq(&av)
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::default();
    let t = Instant::now();
    let (lasso, _) = seeded_lasso(50, 60, 3, 1.0);
    let x_star = ista_oracle(&lasso, 1e-10);
    let p = lasso.to_mgvi().unwrap();
    let params = SolverParams { tol_inf: 1e-8, ..Default::default() };
    let (nu, g) = (params.nu, params.gamma);
    let x0 = vec![1.0; 60];
    let slack = |x: &[f64]| 1e-8 * (1.0 + norm2_sq(x));

    let mut rec = Recorder::default();
    let ok = solve_gem_observed(&p, &params, &x0, &mut rec).unwrap().converged();
    let viol = rec
        .steps
        .iter()
        .filter(|(_, x, xt, xn, ..)| {
            dist_sq(xn, &x_star) > dist_sq(x, &x_star) - (1.0 - nu * nu) * dist_sq(x, xt) + slack(x)
        })
        .count();
    out.note(format!("gem: {} iterations, {viol} violations", rec.steps.len()));
    out.check("gem inequality", ok && viol == 0 && !rec.steps.is_empty());

    let mut rec = Recorder::default();
    let ok = solve_pga_a1_observed(&p, &params, &x0, &mut rec).unwrap().converged();
    let viol = rec
        .steps
        .iter()
        .filter(|(_, x, xt, xn, _, a)| {
            dist_sq(xn, &x_star) > dist_sq(x, &x_star) - g * (2.0 - g) * a.unwrap() * dist_sq(x, xt) + slack(x)
        })
        .count();
    out.note(format!("pga-a1: {} iterations, {viol} violations", rec.steps.len()));
    out.check("pga-a1 contraction", ok && viol == 0);

    let mut rec = Recorder::default();
    let ok = solve_pga_b1_observed(&p, &params, &x0, &mut rec).unwrap().converged();
    let viol = rec
        .steps
        .iter()
        .filter(|(_, x, xt, xn, _, a)| {
            let rhs = dist_sq(x, &x_star) - (2.0 - g) * g * a.unwrap() * (1.0 - nu) * dist_sq(x, xt);
            dist_sq(xn, &x_star) > rhs + slack(x)
        })
        .count();
    out.note(format!("pga-b1: {} iterations, {viol} violations", rec.steps.len()));
    out.check("pga-b1 contraction", ok && viol == 0);

    let mut rec = Recorder::default();
    let ok = solve_pga_a2_observed(&p, &params, &x0, &mut rec).unwrap().converged();
    let viol = rec
        .steps
        .iter()
        .filter(|(beta, x, xt, xn, _, a)| {
            let before = g_norm_sq(&lasso, &diff(x, &x_star), *beta, 1.0);
            let after = g_norm_sq(&lasso, &diff(xn, &x_star), *beta, 1.0);
            after > before - g * (2.0 - g) * a.unwrap() * dist_sq(x, xt) + 1e-8 * (1.0 + before)
        })
        .count();
    out.note(format!("pga-a2: {} iterations, {viol} violations (G = I + beta AtA)", rec.steps.len()));
    out.check("pga-a2 contraction in G-norm", ok && viol == 0);

    let mut rec = Recorder::default();
    let ok = solve_pga_b2_observed(&p, &params, &x0, &mut rec).unwrap().converged();
    let viol = rec
        .steps
        .iter()
        .filter(|(beta, x, xt, xn, ..)| {
            let before = g_norm_sq(&lasso, &diff(x, &x_star), *beta, -1.0);
            let after = g_norm_sq(&lasso, &diff(xn, &x_star), *beta, -1.0);
            let gain = (2.0 - g) * g * g_norm_sq(&lasso, &diff(x, xt), *beta, -1.0);
            after > before - gain + 1e-8 * (1.0 + before)
        })
        .count();
    out.note(format!("pga-b2: {} iterations, {viol} violations (G = I - beta AtA)", rec.steps.len()));
    out.check("pga-b2 contraction in G-norm", ok && viol == 0);

    let secs = t.elapsed().as_secs_f64();
    out.note(format!("runtime {secs:.2} s"));
    out.check("runtime under 5 s", secs < 5.0);
    out
}

fn random_matrix(s: &mut NormalStream, r: usize, c: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(r, c, (0..r * c).map(|_| s.normal()).collect()).unwrap()
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::default();
    let mut s = NormalStream::new(2024);
    let (mut bad_grow, mut bad_ratio, mut worst) = (0, 0, 0.0f64);
    for trial in 0..1000 {
        let m = 1 + (s.uniform() * 8.0) as usize;
        let n = 1 + (s.uniform() * 8.0) as usize;
        let a = random_matrix(&mut s, m, n);
        let b: Vec<f64> = (0..m).map(|_| s.normal()).collect();
        let lam = 0.05 + 2.0 * s.uniform();
        // alternate lasso instances and lifted basis-pursuit saddles
        let lasso = Lasso::new(a, b, lam).unwrap();
        let p = if trial % 2 == 0 { lasso.to_mgvi().unwrap() } else { lasso.to_basis_pursuit().unwrap().lift().unwrap() };
        let dim = p.dim();
        let x: Vec<f64> = (0..dim).map(|_| 3.0 * s.normal()).collect();
        let b1 = 10f64.powf(-3.0 + 4.0 * s.uniform());
        let b2 = b1 * (1.0 + 10.0 * s.uniform());
        let e1 = norm2(&residual(&p, &x, b1).unwrap());
        let e2 = norm2(&residual(&p, &x, b2).unwrap());
        let scale = 1.0 + e1.max(e2);
        worst = worst.max((e1 - e2) / scale).max((e2 / b2 - e1 / b1) / (1.0 + e1 / b1));
        if e2 < e1 - 1e-10 * scale {
            bad_grow += 1;
        }
        if e2 / b2 > e1 / b1 + 1e-10 * (1.0 + e1 / b1) {
            bad_ratio += 1;
        }
    }
    out.note(format!("1000 triples, worst scaled violation {worst:.2e}"));
    out.check("||e(x,b2)|| >= ||e(x,b1)||", bad_grow == 0);
    out.check("||e(x,b2)||/b2 <= ||e(x,b1)||/b1", bad_ratio == 0);
    out
}

fn bp_instance(m: usize, n: usize, seed: u64) -> SaddleProblem {
    seeded_lasso(m, n, seed, 1.0).0.to_basis_pursuit().unwrap()
}

fn bp_start(sp: &SaddleProblem) -> SaddlePoint {
    SaddlePoint::new(Vector::filled(sp.n(), 1.0), Vector::zeros(sp.q()), Vector::zeros(sp.m()))
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::default();
    let sp = bp_instance(80, 90, 12);
    let params = SolverParams::default();
    let nu = params.nu;
    for method in [SaddleMethod::PgaB1, SaddleMethod::PgaA1] {
        let mut rec = Recorder::default();
        let r = solve_saddle_observed(&sp, method, &params, &bp_start(&sp), false, &mut rec).unwrap();
        let (mut half, mut order, mut ratio, mut min_b1, mut worst_rel) = (0, 0, 0, f64::INFINITY, 0.0f64);
        for (beta, z, zt, _, r_k, alpha) in &rec.steps {
            let zp = SaddlePoint::unstack(&sp, z).unwrap();
            let ztp = SaddlePoint::unstack(&sp, zt).unwrap();
            let (a1, b1) = saddle_step_sizes(&sp, &zp, &ztp, *beta).unwrap();
            let used = alpha.unwrap();
            let expected = if method == SaddleMethod::PgaB1 { b1 } else { a1 };
            worst_rel = worst_rel.max((used - expected).abs() / expected);
            min_b1 = min_b1.min(b1);
            half += usize::from(b1 <= 0.5);
            order += usize::from(b1 > a1 + 1e-12);
            ratio += usize::from(r_k.is_none_or(|v| v > nu));
        }
        out.note(format!(
            "{method:?}: {} accepted steps ({}), min alpha_b1 {min_b1:.4}, solver alpha vs block formula {worst_rel:.1e}",
            rec.steps.len(),
            r.status
        ));
        out.check(format!("{method:?} run converged"), r.converged());
        // the solver forms F(x) − F(x̃) from two O(1) vectors, so near the
        // solution its α* carries rounding far above machine epsilon
        out.check(format!("{method:?} solver alpha matches block formula"), worst_rel <= 1e-6);
        out.check(format!("{method:?} alpha_b1 > 1/2"), half == 0);
        out.check(format!("{method:?} alpha_b1 <= alpha_a1 + 1e-12"), order == 0);
        out.check(format!("{method:?} r_k <= nu"), ratio == 0);
    }
    // r_k on the lasso trajectories of the adaptive methods
    let (lasso, _) = seeded_lasso(50, 60, 3, 1.0);
    let p = lasso.to_mgvi().unwrap();
    type Observed = fn(&MgviProblem, &SolverParams, &[f64], &mut dyn Observer) -> mgvi::Result<mgvi::solvers::SolveResult>;
    for (name, solve) in [
        ("gem", solve_gem_observed as Observed),
        ("pga-a1", solve_pga_a1_observed),
        ("pga-b1", solve_pga_b1_observed),
    ] {
        let mut rec = Recorder::default();
        solve(&p, &params, &vec![1.0; 60], &mut rec).unwrap();
        let bad = rec.steps.iter().filter(|s| s.4.is_none_or(|v| v > nu)).count();
        let half = if name == "pga-b1" { rec.steps.iter().filter(|s| s.5.unwrap() <= 0.5).count() } else { 0 };
        out.check(format!("lasso {name} r_k <= nu and alpha bound"), bad == 0 && half == 0);
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::default();
    let params = SolverParams { tol_inf: 1e-10, max_iter: 500_000, ..Default::default() };
    let lasso_solvers = [
        SolverName::Ista,
        SolverName::Gem,
        SolverName::PgaA1,
        SolverName::PgaA2,
        SolverName::PgaB1,
        SolverName::PgaB2,
    ];

    // |x| + ½(x − 3)²: F(x) = x − 3, x* = 2
    let one = Lasso::new(DenseMatrix::identity(1), vec![3.0], 1.0).unwrap();
    for name in lasso_solvers {
        let r = run_on_lasso(&one, name, &params, &[0.0]).unwrap();
        let err = (r.x_final[0] - 2.0).abs();
        out.note(format!("1-D {:<7} x = {:.12} ({} it)", name.as_str(), r.x_final[0], r.iterations()));
        out.check(format!("1-D {name}"), r.converged() && err <= 1e-6);
    }
    // the same problem as a two-block split, for the saddle solvers and baselines
    let split = SaddleProblem::new(
        Arc::new(L1Norm::new(1.0).unwrap()),
        Arc::new(HalfSquaredDistance { center: vec![3.0] }),
        DenseMatrix::identity(1),
        DenseMatrix::scaled_identity(1, -1.0),
        vec![0.0],
    )
    .unwrap();
    let mut admm_params = params;
    admm_params.tol_inf = 1e-12;
    for name in [SolverName::Gem, SolverName::PgaA1, SolverName::PgaB1, SolverName::Admm, SolverName::Adlpmm] {
        let p = if matches!(name, SolverName::Admm | SolverName::Adlpmm) { &admm_params } else { &params };
        let r = run_on_saddle(&split, name, p, &SaddlePoint::zeros(&split), false).unwrap();
        let z = SaddlePoint::unstack(&split, &r.x_final).unwrap();
        let err = (z.x[0] - 2.0).abs().max((z.y[0] - 2.0).abs());
        out.note(format!("1-D split {:<7} x = {:.12} y = {:.12}", name.as_str(), z.x[0], z.y[0]));
        out.check(format!("1-D split {name}"), r.converged() && err <= 1e-6);
    }

    let (lasso, _) = seeded_lasso(4, 5, 17, 0.3);
    let oracle = ista_oracle(&lasso, 1e-12);
    out.note(format!("n = 5 oracle {oracle:.8?}"));
    for name in lasso_solvers {
        let r = run_on_lasso(&lasso, name, &params, &[1.0; 5]).unwrap();
        let d = max_diff(&r.x_final, &oracle);
        out.note(format!("n = 5 {:<7} max diff {d:.2e}", name.as_str()));
        out.check(format!("n = 5 {name}"), r.converged() && d <= 1e-6);
    }
    out
}

struct Iterates(Vec<Vec<u64>>);

impl Observer for Iterates {
    fn on_step(&mut self, s: &StepView<'_>) {
        self.0.push(s.x_next.iter().map(|v| v.to_bits()).collect());
    }
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::default();
    let sp = bp_instance(120, 150, 7);
    let params = SolverParams { tol_inf: 1e-300, max_iter: 101, ..Default::default() };
    for method in [SaddleMethod::Gem, SaddleMethod::PgaA1, SaddleMethod::PgaB1] {
        let run = |lanes: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(lanes).build().unwrap();
            pool.install(|| {
                let mut it = Iterates(Vec::new());
                solve_saddle_observed(&sp, method, &params, &bp_start(&sp), lanes > 1, &mut it).unwrap();
                it.0
            })
        };
        let (one, three) = (run(1), run(3));
        let first_diff = one.iter().zip(&three).position(|(a, b)| a != b);
        out.note(format!("{method:?}: {} vs {} iterates, first difference {first_diff:?}", one.len(), three.len()));
        out.check(format!("{method:?} bitwise identical"), one.len() >= 100 && one == three);
    }
    out
}

fn strip_wall(table: &str) -> String {
    let header = table.lines().next().unwrap_or_default();
    let col = header.split_whitespace().position(|c| c == "wall_s");
    table
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split_whitespace().collect();
            if let Some(c) = col {
                if f.len() > c && !l.starts_with("skipped") {
                    f.remove(c);
                }
            }
            f.join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::default();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_mgvi"))
            .args(["bench", "lasso", "--m", "200", "--n", "220", "--lambda", "1", "--seed", "5", "--tol", "1e-6"])
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        let stdout = String::from_utf8_lossy(&o.stdout).into_owned();
        let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap_or_default();
        runs.push((o.status.code(), strip_wall(&stdout), strip_wall(&summary)));
    }
    out.note(runs[0].1.lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n"));
    out.check("both runs exit 0", runs.iter().all(|r| r.0 == Some(0)));
    out.check("stdout tables identical without wall time", !runs[0].1.is_empty() && runs[0].1 == runs[1].1);
    out.check("summary.txt identical without wall time", !runs[0].2.is_empty() && runs[0].2 == runs[1].2);
    out
}

type Criterion = fn() -> Outcome;

#[test]
fn acceptance() {
    let criteria: [(&str, Criterion); 8] = [
        ("lasso reproduction", criterion_1),
        ("basis pursuit reproduction", criterion_2),
        ("contraction suite", criterion_3),
        ("residual monotonicity", criterion_4),
        ("step-size invariants", criterion_5),
        ("oracle equivalence", criterion_6),
        ("parallel equivalence", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let failed = o.failed();
        println!(
            "criterion {}: {} ({title}, {:.1} s)",
            i + 1,
            if o.passed() { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        for n in &o.notes {
            println!("    {n}");
        }
        for f in &failed {
            println!("    failed: {f}");
        }
        // tolerated only for the entry-accuracy sub-check of criterion 1,
        // and only while the errors match the analytic lasso bias
        let tolerated = |f: &&str| i == 0 && f.ends_with(ENTRY_CHECK);
        if failed.iter().any(tolerated) {
            println!("    expected: the lasso minimizer sits at the analytic bias above, beyond 1e-3 for lambda = 1");
        }
        unexpected.extend(failed.iter().filter(|f| !tolerated(f)).map(|f| format!("criterion {}: {f}", i + 1)));
    }
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));
}
