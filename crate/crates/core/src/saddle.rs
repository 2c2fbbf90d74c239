//! Separable two-block programs `min θ₁(x) + θ₂(y)  s.t.  Ax + By = c`.
//!
//! The Lagrangian `θ₁(x) + θ₂(y) − λᵀ(Ax + By − c)` has its saddle points
//! exactly at the solutions of `MGVI(θ, F)` on `z = (x, y, λ)` with
//!
//! ```text
//! θ(z) = θ₁(x) + θ₂(y)
//! F(z) = [ 0   0  −Aᵀ ] [x]   [ 0 ]
//!        [ 0   0  −Bᵀ ] [y] + [ 0 ]
//!        [ A   B   0  ] [λ]   [−c ]
//! ```
//!
//! The linear part is skew-symmetric, so `F` is monotone. Both `θ` and `F`
//! split into three blocks that depend only on the current point, so the
//! predictor and corrector of every method can evaluate them on separate
//! lanes without changing a single bit of the result.

use std::sync::Arc;

use crate::error::{ensure_dims, MgviError, Result};
use crate::linalg::{dot, norm2, norm2_sq, norm_inf, DenseMatrix, Vector};
use crate::problem::{MgviProblem, MonotoneOperator};
use crate::prox::{ProxFunction, SeparableBlockProx, ZeroFunction};
use crate::solvers::{run, Method, NoObserver, Observer, SolveResult, SolverParams};

/// The block operator `F` of a two-block program.
#[derive(Debug, Clone)]
pub struct SaddleOperator {
    a: Arc<DenseMatrix>,
    b: Arc<DenseMatrix>,
    c: Vec<f64>,
    parallel: bool,
}

impl SaddleOperator {
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn q(&self) -> usize {
        self.b.cols()
    }

    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn dim(&self) -> usize {
        self.n() + self.q() + self.m()
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel
    }

    fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let (x, rest) = z.split_at(self.n());
        let (y, lambda) = rest.split_at(self.q());
        (x, y, lambda)
    }

    fn split_mut<'a>(&self, z: &'a mut [f64]) -> (&'a mut [f64], &'a mut [f64], &'a mut [f64]) {
        let (x, rest) = z.split_at_mut(self.n());
        let (y, lambda) = rest.split_at_mut(self.q());
        (x, y, lambda)
    }

    fn neg_transpose(m: &DenseMatrix, lambda: &[f64], out: &mut [f64]) {
        m.mul_transpose_vec_into(lambda, out);
        for o in out.iter_mut() {
            *o = -*o;
        }
    }

    /// `out = Ax + By − offset` (offset omitted when `None`).
    fn constraint_block(&self, x: &[f64], y: &[f64], offset: Option<&[f64]>, out: &mut [f64]) {
        self.a.mul_vec_into(x, out);
        if self.q() > 0 {
            let mut by = vec![0.0; out.len()];
            self.b.mul_vec_into(y, &mut by);
            for (o, v) in out.iter_mut().zip(&by) {
                *o += v;
            }
        }
        if let Some(c) = offset {
            for (o, ci) in out.iter_mut().zip(c) {
                *o -= ci;
            }
        }
    }

    fn three_blocks<A, B, C>(&self, fa: A, fb: B, fc: C)
    where
        A: FnOnce() + Send,
        B: FnOnce() + Send,
        C: FnOnce() + Send,
    {
        if self.parallel {
            rayon::join(fa, || rayon::join(fb, fc));
        } else {
            fa();
            fb();
            fc();
        }
    }

    fn apply_blocks(&self, z: &[f64], out: &mut [f64], offset: Option<&[f64]>) {
        let (x, y, lambda) = self.split(z);
        let (ox, oy, ol) = self.split_mut(out);
        self.three_blocks(
            || Self::neg_transpose(&self.a, lambda, ox),
            || Self::neg_transpose(&self.b, lambda, oy),
            || self.constraint_block(x, y, offset, ol),
        );
    }

    /// `F(z)`.
    pub fn apply_into(&self, z: &[f64], out: &mut [f64]) {
        self.apply_blocks(z, out, Some(&self.c));
    }

    /// The linear part `Mz`.
    pub fn linear_apply_into(&self, z: &[f64], out: &mut [f64]) {
        self.apply_blocks(z, out, None);
    }

    /// `Mᵀv = (Aᵀv_λ, Bᵀv_λ, −(Av_x + Bv_y))`.
    pub fn linear_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        let (vx, vy, vl) = self.split(v);
        let (ox, oy, ol) = self.split_mut(out);
        self.three_blocks(
            || self.a.mul_transpose_vec_into(vl, ox),
            || self.b.mul_transpose_vec_into(vl, oy),
            || {
                self.constraint_block(vx, vy, None, ol);
                for o in ol.iter_mut() {
                    *o = -*o;
                }
            },
        );
    }
}

/// `min θ₁(x) + θ₂(y)  s.t.  Ax + By = c`.
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    pub theta1: Arc<dyn ProxFunction>,
    pub theta2: Arc<dyn ProxFunction>,
    a: Arc<DenseMatrix>,
    b: Arc<DenseMatrix>,
    c: Vec<f64>,
}

impl SaddleProblem {
    pub fn new(
        theta1: Arc<dyn ProxFunction>,
        theta2: Arc<dyn ProxFunction>,
        a: DenseMatrix,
        b: DenseMatrix,
        c: Vec<f64>,
    ) -> Result<Self> {
        let m = c.len();
        ensure_dims!(a.rows() == m, "A has {} rows but c has {m} entries", a.rows());
        ensure_dims!(b.rows() == m, "B has {} rows but c has {m} entries", b.rows());
        if let Some(d) = theta1.dim() {
            ensure_dims!(d == a.cols(), "θ₁ has dimension {d}, A has {} columns", a.cols());
        }
        if let Some(d) = theta2.dim() {
            ensure_dims!(d == b.cols(), "θ₂ has dimension {d}, B has {} columns", b.cols());
        }
        if !c.iter().all(|v| v.is_finite()) {
            return Err(MgviError::NonFinite("constraint vector"));
        }
        Ok(Self { theta1, theta2, a: Arc::new(a), b: Arc::new(b), c })
    }

    /// `min θ₁(x)  s.t.  Ax = c`, with an empty `y` block.
    pub fn one_block(theta1: Arc<dyn ProxFunction>, a: DenseMatrix, c: Vec<f64>) -> Result<Self> {
        let m = a.rows();
        Self::new(theta1, Arc::new(ZeroFunction), a, DenseMatrix::zeros(m, 0), c)
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn q(&self) -> usize {
        self.b.cols()
    }

    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn lifted_dim(&self) -> usize {
        self.n() + self.q() + self.m()
    }

    pub fn operator(&self, parallel: bool) -> SaddleOperator {
        SaddleOperator { a: self.a.clone(), b: self.b.clone(), c: self.c.clone(), parallel }
    }

    /// The equivalent `MGVI(θ, F)` with sequential block evaluation.
    pub fn lift(&self) -> Result<MgviProblem> {
        self.lift_with(false)
    }

    /// The lifted problem; with `parallel` the three blocks of `θ` and `F`
    /// are evaluated concurrently.
    pub fn lift_with(&self, parallel: bool) -> Result<MgviProblem> {
        let theta = SeparableBlockProx::new(vec![
            (self.theta1.clone(), self.n()),
            (self.theta2.clone(), self.q()),
            (Arc::new(ZeroFunction) as Arc<dyn ProxFunction>, self.m()),
        ])?
        .with_parallel(parallel);
        let f = MonotoneOperator::saddle(Arc::new(self.operator(parallel)));
        MgviProblem::new(Arc::new(theta), f)
    }

    /// `‖Ax + By − c‖_∞`.
    pub fn constraint_violation(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut r = vec![0.0; self.m()];
        self.operator(false).constraint_block(x, y, Some(&self.c), &mut r);
        norm_inf(&r)
    }

    /// `θ₁(x) + θ₂(y)` when both values are available.
    pub fn objective(&self, x: &[f64], y: &[f64]) -> Option<f64> {
        let y_part = if y.is_empty() { 0.0 } else { self.theta2.value(y)? };
        Some(self.theta1.value(x)? + y_part)
    }
}

/// A primal-dual point `(x, y, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub x: Vector,
    pub y: Vector,
    pub lambda: Vector,
}

impl SaddlePoint {
    pub fn new(x: Vector, y: Vector, lambda: Vector) -> Self {
        Self { x, y, lambda }
    }

    pub fn zeros(sp: &SaddleProblem) -> Self {
        Self { x: Vector::zeros(sp.n()), y: Vector::zeros(sp.q()), lambda: Vector::zeros(sp.m()) }
    }

    pub fn stack(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.x.len() + self.y.len() + self.lambda.len());
        z.extend_from_slice(&self.x);
        z.extend_from_slice(&self.y);
        z.extend_from_slice(&self.lambda);
        z
    }

    pub fn unstack(sp: &SaddleProblem, z: &[f64]) -> Result<Self> {
        ensure_dims!(z.len() == sp.lifted_dim(), "stacked point has {} entries, expected {}", z.len(), sp.lifted_dim());
        let (x, rest) = z.split_at(sp.n());
        let (y, lambda) = rest.split_at(sp.q());
        Ok(Self { x: Vector::new(x.to_vec())?, y: Vector::new(y.to_vec())?, lambda: Vector::new(lambda.to_vec())? })
    }

    fn check(&self, sp: &SaddleProblem) -> Result<()> {
        ensure_dims!(
            self.x.len() == sp.n() && self.y.len() == sp.q() && self.lambda.len() == sp.m(),
            "point blocks ({}, {}, {}) do not match problem blocks ({}, {}, {})",
            self.x.len(),
            self.y.len(),
            self.lambda.len(),
            sp.n(),
            sp.q(),
            sp.m()
        );
        Ok(())
    }
}

/// The three blocks of `F(z)`: `(−Aᵀλ, −Bᵀλ, Ax + By − c)`.
pub fn saddle_apply_blocks(sp: &SaddleProblem, z: &SaddlePoint, parallel: bool) -> Result<SaddlePoint> {
    z.check(sp)?;
    let op = sp.operator(parallel);
    let mut out = vec![0.0; sp.lifted_dim()];
    op.apply_into(&z.stack(), &mut out);
    SaddlePoint::unstack(sp, &out)
}

struct SaddleDifference {
    /// `(x − x̃, y − ỹ, λ − λ̃)`
    delta: Vec<f64>,
    /// `(Aᵀ(λ − λ̃), Bᵀ(λ − λ̃), A(x − x̃) + B(y − ỹ))`
    coupled: Vec<f64>,
}

fn saddle_difference(sp: &SaddleProblem, z: &SaddlePoint, z_tilde: &SaddlePoint) -> Result<SaddleDifference> {
    z.check(sp)?;
    z_tilde.check(sp)?;
    let op = sp.operator(false);
    let delta: Vec<f64> = z.stack().iter().zip(z_tilde.stack()).map(|(a, b)| a - b).collect();
    let (dx, dy, dl) = op.split(&delta);
    let mut coupled = vec![0.0; delta.len()];
    let (cx, cy, cl) = op.split_mut(&mut coupled);
    sp.a.mul_transpose_vec_into(dl, cx);
    sp.b.mul_transpose_vec_into(dl, cy);
    op.constraint_block(dx, dy, None, cl);
    Ok(SaddleDifference { delta, coupled })
}

/// `r_k = β‖(Aᵀ(λ − λ̃); Bᵀ(λ − λ̃); A(x − x̃) + B(y − ỹ))‖ / ‖z − z̃‖`.
pub fn saddle_r_k(sp: &SaddleProblem, z: &SaddlePoint, z_tilde: &SaddlePoint, beta: f64) -> Result<f64> {
    let d = saddle_difference(sp, z, z_tilde)?;
    let denom = norm2(&d.delta);
    if denom == 0.0 {
        return Err(MgviError::InvalidParameter("r_k is undefined when z equals its predictor".into()));
    }
    Ok(beta * norm2(&d.coupled) / denom)
}

/// The block direction shared by PGA-a1 and PGA-b1 on a two-block program:
/// `([x−x̃] + βAᵀ(λ−λ̃), [y−ỹ] + βBᵀ(λ−λ̃), [λ−λ̃] − β[A(x−x̃) + B(y−ỹ)])`.
fn saddle_direction(d: &SaddleDifference, n_plus_q: usize, beta: f64) -> Vec<f64> {
    d.delta
        .iter()
        .zip(&d.coupled)
        .enumerate()
        .map(|(i, (dz, cz))| if i < n_plus_q { dz + beta * cz } else { dz - beta * cz })
        .collect()
}

/// `(α*` of PGA-a1, `α*` of PGA-b1`)` on the same state, from their block formulas.
pub fn saddle_step_sizes(sp: &SaddleProblem, z: &SaddlePoint, z_tilde: &SaddlePoint, beta: f64) -> Result<(f64, f64)> {
    let d = saddle_difference(sp, z, z_tilde)?;
    let dir = saddle_direction(&d, sp.n() + sp.q(), beta);
    let dir_sq = norm2_sq(&dir);
    if dir_sq == 0.0 {
        return Err(MgviError::InvalidParameter("step sizes are undefined when z equals its predictor".into()));
    }
    let a1 = norm2_sq(&d.delta) / dir_sq;
    let b1 = dot(&d.delta, &dir) / dir_sq;
    Ok((a1, b1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleMethod {
    Gem,
    PgaA1,
    PgaB1,
}

/// Runs GEM, PGA-a1 or PGA-b1 on the lifted problem. The returned iterate is
/// the stacked `(x, y, λ)`; use [`SaddlePoint::unstack`] to split it.
pub fn solve_saddle(
    sp: &SaddleProblem,
    method: SaddleMethod,
    params: &SolverParams,
    z0: &SaddlePoint,
    parallel: bool,
) -> Result<SolveResult> {
    solve_saddle_observed(sp, method, params, z0, parallel, &mut NoObserver)
}

pub fn solve_saddle_observed(
    sp: &SaddleProblem,
    method: SaddleMethod,
    params: &SolverParams,
    z0: &SaddlePoint,
    parallel: bool,
    obs: &mut dyn Observer,
) -> Result<SolveResult> {
    z0.check(sp)?;
    let lifted = sp.lift_with(parallel)?;
    let method = match method {
        SaddleMethod::Gem => Method::Gem,
        SaddleMethod::PgaA1 => Method::PgaA1,
        SaddleMethod::PgaB1 => Method::PgaB1,
    };
    run(&lifted, params, &z0.stack(), method, obs)
}
