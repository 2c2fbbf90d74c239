//! The problem container `MGVI(θ, F)`: find `x*` with
//! `θ(x) − θ(x*) + (x − x*)ᵀF(x*) ≥ 0` for all `x`.

use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_dims, MgviError, Result};
use crate::linalg::{dot, spectral_norm_estimate, DenseMatrix};
use crate::prox::ProxFunction;
use crate::saddle::SaddleOperator;

/// Asymmetry allowed before a dense matrix stops counting as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

const SPECTRAL_TOL: f64 = 1e-10;
const SPECTRAL_MAX_ITER: usize = 5000;

/// A linear map that can be applied and transposed without being formed.
#[derive(Debug, Clone)]
pub enum LinearMap {
    Dense(Arc<DenseMatrix>),
    /// `AᵀA` for the wrapped `A`.
    Gram(Arc<DenseMatrix>),
}

impl LinearMap {
    pub fn dim(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.cols(),
            LinearMap::Gram(a) => a.cols(),
        }
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        match self {
            LinearMap::Dense(m) => m.mul_vec_into(v, out),
            LinearMap::Gram(a) => {
                let mut tmp = vec![0.0; a.rows()];
                a.mul_vec_into(v, &mut tmp);
                a.mul_transpose_vec_into(&tmp, out);
            }
        }
    }

    pub fn apply_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        match self {
            LinearMap::Dense(m) => m.mul_transpose_vec_into(v, out),
            LinearMap::Gram(_) => self.apply_into(v, out),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            LinearMap::Dense(m) => m.asymmetry().is_some_and(|a| a < SYMMETRY_TOL),
            LinearMap::Gram(_) => true,
        }
    }

    /// Power-iteration estimate of `‖·‖₂`; zero for the zero map.
    pub fn spectral_norm(&self) -> f64 {
        let (m, squared) = match self {
            LinearMap::Dense(m) => (m, false),
            LinearMap::Gram(a) => (a, true),
        };
        match spectral_norm_estimate(m, SPECTRAL_TOL, SPECTRAL_MAX_ITER) {
            Ok(e) if squared => e.value * e.value,
            Ok(e) => e.value,
            Err(_) => 0.0,
        }
    }
}

type OperatorFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// What is known about the structure of `F`.
#[derive(Clone)]
pub enum OperatorStructure {
    General(Arc<OperatorFn>),
    /// `F(x) = Mx + q` with `M` positive semidefinite (not necessarily symmetric).
    Affine { m: LinearMap, q: Vec<f64> },
    /// `F(x) = Ax + c` with `A` symmetric positive semidefinite.
    AffineSymmetric { a: LinearMap, c: Vec<f64> },
    /// The skew block operator of a linearly constrained two-block program.
    SaddleTwoBlock(Arc<SaddleOperator>),
}

impl fmt::Debug for OperatorStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorStructure::General(_) => f.write_str("General"),
            OperatorStructure::Affine { m, .. } => write!(f, "Affine(dim {})", m.dim()),
            OperatorStructure::AffineSymmetric { a, .. } => write!(f, "AffineSymmetric(dim {})", a.dim()),
            OperatorStructure::SaddleTwoBlock(op) => write!(f, "SaddleTwoBlock({op:?})"),
        }
    }
}

/// A monotone map `F: ℝⁿ → ℝⁿ`.
#[derive(Debug, Clone)]
pub struct MonotoneOperator {
    structure: OperatorStructure,
    dim: usize,
    lipschitz_hint: Option<f64>,
}

impl MonotoneOperator {
    /// Wraps an arbitrary map. Monotonicity is assumed, not checked.
    pub fn general<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self { structure: OperatorStructure::General(Arc::new(f)), dim, lipschitz_hint: None }
    }

    pub fn affine(m: LinearMap, q: Vec<f64>) -> Result<Self> {
        ensure_dims!(m.dim() == q.len(), "affine operator: matrix dimension {} vs offset {}", m.dim(), q.len());
        if let LinearMap::Dense(d) = &m {
            ensure_dims!(d.is_square(), "affine operator needs a square matrix, got {}x{}", d.rows(), d.cols());
        }
        let dim = q.len();
        Ok(Self { structure: OperatorStructure::Affine { m, q }, dim, lipschitz_hint: None })
    }

    pub fn affine_symmetric(a: LinearMap, c: Vec<f64>) -> Result<Self> {
        ensure_dims!(a.dim() == c.len(), "affine operator: matrix dimension {} vs offset {}", a.dim(), c.len());
        if !a.is_symmetric() {
            return Err(MgviError::InvalidParameter("matrix is not symmetric".into()));
        }
        let dim = c.len();
        Ok(Self { structure: OperatorStructure::AffineSymmetric { a, c }, dim, lipschitz_hint: None })
    }

    pub fn saddle(op: Arc<SaddleOperator>) -> Self {
        let dim = op.dim();
        Self { structure: OperatorStructure::SaddleTwoBlock(op), dim, lipschitz_hint: None }
    }

    pub fn with_lipschitz_hint(mut self, l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(MgviError::InvalidParameter(format!("Lipschitz hint must be positive, got {l}")));
        }
        self.lipschitz_hint = Some(l);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> &OperatorStructure {
        &self.structure
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.structure {
            OperatorStructure::General(f) => f(x, out),
            OperatorStructure::Affine { m, q: off } | OperatorStructure::AffineSymmetric { a: m, c: off } => {
                m.apply_into(x, out);
                for (o, c) in out.iter_mut().zip(off) {
                    *o += c;
                }
            }
            OperatorStructure::SaddleTwoBlock(op) => op.apply_into(x, out),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// `Mᵀv` for affine operators; `false` (and `out` untouched) otherwise.
    pub fn linear_transpose_into(&self, v: &[f64], out: &mut [f64]) -> bool {
        match &self.structure {
            OperatorStructure::General(_) => false,
            OperatorStructure::Affine { m, .. } => {
                m.apply_transpose_into(v, out);
                true
            }
            OperatorStructure::AffineSymmetric { a, .. } => {
                a.apply_into(v, out);
                true
            }
            OperatorStructure::SaddleTwoBlock(op) => {
                op.linear_transpose_into(v, out);
                true
            }
        }
    }

    /// `vᵀMv` for affine operators.
    pub fn quadratic_form(&self, v: &[f64]) -> Option<f64> {
        let mut mv = vec![0.0; self.dim];
        match &self.structure {
            OperatorStructure::General(_) => return None,
            OperatorStructure::Affine { m, .. } | OperatorStructure::AffineSymmetric { a: m, .. } => {
                m.apply_into(v, &mut mv)
            }
            OperatorStructure::SaddleTwoBlock(op) => op.linear_apply_into(v, &mut mv),
        }
        Some(dot(v, &mv))
    }

    /// The linear part when it is known to be symmetric.
    pub fn symmetric_linear_part(&self) -> Option<&LinearMap> {
        match &self.structure {
            OperatorStructure::AffineSymmetric { a, .. } => Some(a),
            OperatorStructure::Affine { m, .. } if m.is_symmetric() => Some(m),
            _ => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        !matches!(self.structure, OperatorStructure::General(_))
    }
}

/// `MGVI(θ, F)` on `ℝ^dim`.
#[derive(Debug, Clone)]
pub struct MgviProblem {
    theta: Arc<dyn ProxFunction>,
    f: MonotoneOperator,
    dim: usize,
}

impl MgviProblem {
    pub fn new(theta: Arc<dyn ProxFunction>, f: MonotoneOperator) -> Result<Self> {
        let dim = f.dim();
        if dim == 0 {
            return Err(MgviError::DimensionMismatch("problem dimension must be positive".into()));
        }
        if let Some(d) = theta.dim() {
            ensure_dims!(d == dim, "θ has dimension {d}, operator has dimension {dim}");
        }
        Ok(Self { theta, f, dim })
    }

    pub fn theta(&self) -> &dyn ProxFunction {
        self.theta.as_ref()
    }

    pub fn theta_arc(&self) -> &Arc<dyn ProxFunction> {
        &self.theta
    }

    pub fn operator(&self) -> &MonotoneOperator {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}
