//! The `ℓ₁`-regularized least-squares problem `min ½‖Ax − b‖² + λ‖x‖₁`
//! and its constrained sibling, basis pursuit `min ‖x‖₁ s.t. Ax = b`.

use std::sync::Arc;

use crate::error::{ensure_dims, MgviError, Result};
use crate::linalg::{norm2_sq, DenseMatrix};
use crate::problem::{LinearMap, MgviProblem, MonotoneOperator};
use crate::prox::L1Norm;
use crate::saddle::SaddleProblem;

#[derive(Debug, Clone)]
pub struct Lasso {
    a: Arc<DenseMatrix>,
    b: Vec<f64>,
    lambda: f64,
}

impl Lasso {
    pub fn new(a: DenseMatrix, b: Vec<f64>, lambda: f64) -> Result<Self> {
        Self::from_shared(Arc::new(a), b, lambda)
    }

    pub fn from_shared(a: Arc<DenseMatrix>, b: Vec<f64>, lambda: f64) -> Result<Self> {
        ensure_dims!(a.rows() == b.len(), "A has {} rows but b has {} entries", a.rows(), b.len());
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(MgviError::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(MgviError::NonFinite("right-hand side"));
        }
        Ok(Self { a, b, lambda })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn a_shared(&self) -> &Arc<DenseMatrix> {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `∇` of the smooth part: `Aᵀ(Ax − b)`.
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let mut r = vec![0.0; self.a.rows()];
        self.a.mul_vec_into(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        self.a.mul_transpose_vec_into(&r, out);
    }

    /// `½‖Ax − b‖² + λ‖x‖₁`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut r = vec![0.0; self.a.rows()];
        self.a.mul_vec_into(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        0.5 * norm2_sq(&r) + self.lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// `MGVI(λ‖·‖₁, AᵀA x − Aᵀb)`. The Gram matrix is never formed.
    pub fn to_mgvi(&self) -> Result<MgviProblem> {
        let mut c = vec![0.0; self.n()];
        self.a.mul_transpose_vec_into(&self.b, &mut c);
        for v in &mut c {
            *v = -*v;
        }
        let f = MonotoneOperator::affine_symmetric(LinearMap::Gram(self.a.clone()), c)?;
        MgviProblem::new(Arc::new(L1Norm::new(self.lambda)?), f)
    }

    /// `min ‖x‖₁ s.t. Ax = b` on the same data.
    pub fn to_basis_pursuit(&self) -> Result<SaddleProblem> {
        SaddleProblem::one_block(Arc::new(L1Norm::new(1.0)?), (*self.a).clone(), self.b.clone())
    }
}
