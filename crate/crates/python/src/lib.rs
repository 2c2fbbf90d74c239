//! Python bindings: lasso and two-block problems, the solvers, and a few
//! building blocks. Matrices cross the boundary as lists of rows.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mgvi::bench::{self, SolverName};
use mgvi::lasso::Lasso;
use mgvi::linalg::{spectral_norm_estimate, DenseMatrix, Vector};
use mgvi::prox::{self, L1Norm, ProxFunction, ZeroFunction};
use mgvi::saddle::{SaddlePoint, SaddleProblem};
use mgvi::solvers::{self, SolveStatus};
use mgvi::MgviError;

fn py_err(e: MgviError) -> PyErr {
    match e {
        MgviError::DimensionMismatch(_)
        | MgviError::NonFinite(_)
        | MgviError::InvalidParameter(_)
        | MgviError::NotApplicable(_)
        | MgviError::NoClosedForm(_) => PyValueError::new_err(e.to_string()),
        MgviError::BacktrackExhausted { .. } => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(py_err)
}

fn solver_name(name: &str) -> PyResult<SolverName> {
    name.parse().map_err(PyValueError::new_err)
}

fn theta(desc: &str) -> PyResult<Arc<dyn ProxFunction>> {
    let parts: Vec<&str> = desc.split_whitespace().collect();
    match parts.as_slice() {
        ["zero"] => Ok(Arc::new(ZeroFunction)),
        ["l1"] => Ok(Arc::new(L1Norm::new(1.0).map_err(py_err)?)),
        ["l1", w] => {
            let w: f64 = w.parse().map_err(|_| PyValueError::new_err(format!("bad l1 weight `{w}`")))?;
            Ok(Arc::new(L1Norm::new(w).map_err(py_err)?))
        }
        _ => Err(PyValueError::new_err(format!("unknown block function `{desc}` (use `l1 <w>` or `zero`)"))),
    }
}

/// Parameters of the predictor-corrector solvers.
#[pyclass(name = "SolverParams", from_py_object)]
#[derive(Clone)]
struct PySolverParams {
    inner: solvers::SolverParams,
}

#[pymethods]
impl PySolverParams {
    #[new]
    #[pyo3(signature = (nu=0.9, mu=0.4, gamma=1.9, beta0=1.0, fixed_beta=None, tol=1e-6, max_iter=20_000, max_backtracks=60))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        nu: f64,
        mu: f64,
        gamma: f64,
        beta0: f64,
        fixed_beta: Option<f64>,
        tol: f64,
        max_iter: usize,
        max_backtracks: usize,
    ) -> PyResult<Self> {
        let inner = solvers::SolverParams {
            nu,
            mu,
            gamma,
            beta0,
            fixed_beta,
            max_iter,
            tol_inf: tol,
            max_backtracks_per_iter: max_backtracks,
        };
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn params_or_default(p: Option<PySolverParams>) -> solvers::SolverParams {
    p.map_or_else(solvers::SolverParams::default, |p| p.inner)
}

/// Outcome of a solve.
#[pyclass(name = "SolveResult", skip_from_py_object)]
struct PySolveResult {
    #[pyo3(get)]
    x: Vec<f64>,
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    final_residual: f64,
    trace: Vec<solvers::IterationRecord>,
}

#[pymethods]
impl PySolveResult {
    #[getter]
    fn converged(&self) -> bool {
        self.status == SolveStatus::Converged.to_string()
    }

    /// One dict per iteration with the trace CSV columns.
    fn trace<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.trace
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("k", r.k)?;
                d.set_item("beta", r.beta)?;
                d.set_item("r_k", r.r_k)?;
                d.set_item("alpha_star", r.alpha_star)?;
                d.set_item("residual_inf", r.residual_inf)?;
                d.set_item("objective", r.objective)?;
                d.set_item("wall_time", r.wall_secs)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(status={:?}, iterations={}, final_residual={:e})",
            self.status, self.iterations, self.final_residual
        )
    }
}

impl From<solvers::SolveResult> for PySolveResult {
    fn from(r: solvers::SolveResult) -> Self {
        Self {
            status: r.status.to_string(),
            iterations: r.iterations(),
            final_residual: r.final_residual(),
            x: r.x_final.into_inner(),
            trace: r.trace,
        }
    }
}

/// `min ½‖Ax − b‖² + λ‖x‖₁`.
#[pyclass(name = "Lasso", skip_from_py_object)]
struct PyLasso {
    inner: Lasso,
}

#[pymethods]
impl PyLasso {
    #[new]
    #[pyo3(signature = (a, b, lam=1.0))]
    fn new(a: Vec<Vec<f64>>, b: Vec<f64>, lam: f64) -> PyResult<Self> {
        Ok(Self { inner: Lasso::new(matrix(a)?, b, lam).map_err(py_err)? })
    }

    /// Seeded instance with the sparse ±1 truth; returns `(problem, x_true)`.
    #[staticmethod]
    #[pyo3(signature = (m, n, seed, lam=1.0))]
    fn generate(m: usize, n: usize, seed: u64, lam: f64) -> PyResult<(Self, Vec<f64>)> {
        let g = bench::generate_lasso_instance(m, n, seed).map_err(py_err)?;
        Ok((Self { inner: Lasso::new(g.a, g.b, lam).map_err(py_err)? }, g.x_true))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b().to_vec()
    }

    fn objective(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.n() {
            return Err(PyValueError::new_err("x has the wrong length"));
        }
        Ok(self.inner.objective(&x))
    }

    /// `‖x − Prox_θ(x − F(x))‖_∞`.
    fn residual_inf(&self, x: Vec<f64>) -> PyResult<f64> {
        let p = self.inner.to_mgvi().map_err(py_err)?;
        solvers::residual_inf(&p, &x).map_err(py_err)
    }

    /// Runs `ista`, `gem`, `pga-a1`, `pga-a2`, `pga-b1` or `pga-b2` from `x0`
    /// (all ones by default).
    #[pyo3(signature = (solver="gem", params=None, x0=None))]
    fn solve(&self, py: Python<'_>, solver: &str, params: Option<PySolverParams>, x0: Option<Vec<f64>>) -> PyResult<PySolveResult> {
        let name = solver_name(solver)?;
        let params = params_or_default(params);
        let x0 = x0.unwrap_or_else(|| vec![1.0; self.inner.n()]);
        let lasso = self.inner.clone();
        let r = py.detach(move || bench::run_on_lasso(&lasso, name, &params, &x0)).map_err(py_err)?;
        Ok(r.into())
    }

    /// The basis pursuit problem `min ‖x‖₁ s.t. Ax = b` on the same data.
    fn basis_pursuit(&self) -> PyResult<PyTwoBlock> {
        Ok(PyTwoBlock { inner: self.inner.to_basis_pursuit().map_err(py_err)? })
    }
}

/// `min θ₁(x) + θ₂(y) s.t. Ax + By = c`, with `θ` given as `"l1 <w>"` or `"zero"`.
#[pyclass(name = "TwoBlockProblem", skip_from_py_object)]
struct PyTwoBlock {
    inner: SaddleProblem,
}

#[pymethods]
impl PyTwoBlock {
    #[new]
    #[pyo3(signature = (a, c, b=None, theta1="l1 1", theta2="zero"))]
    fn new(a: Vec<Vec<f64>>, c: Vec<f64>, b: Option<Vec<Vec<f64>>>, theta1: &str, theta2: &str) -> PyResult<Self> {
        let a = matrix(a)?;
        let b = match b {
            Some(rows) => matrix(rows)?,
            None => DenseMatrix::zeros(a.rows(), 0),
        };
        let inner = SaddleProblem::new(theta(theta1)?, theta(theta2)?, a, b, c).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        (self.inner.m(), self.inner.n(), self.inner.q())
    }

    #[pyo3(signature = (x, y=None))]
    fn constraint_violation(&self, x: Vec<f64>, y: Option<Vec<f64>>) -> f64 {
        self.inner.constraint_violation(&x, &y.unwrap_or_default())
    }

    /// Runs `gem`, `pga-a1`, `pga-b1`, `adlpmm` or `admm`. Starts from
    /// `x = 1, y = 0, λ = 0` unless `z0 = (x, y, λ)` is given. Returns the
    /// result, whose `x` is the stacked `(x, y, λ)`.
    #[pyo3(signature = (solver="gem", params=None, z0=None, parallel=false))]
    fn solve(
        &self,
        py: Python<'_>,
        solver: &str,
        params: Option<PySolverParams>,
        z0: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
        parallel: bool,
    ) -> PyResult<PySolveResult> {
        let name = solver_name(solver)?;
        let params = params_or_default(params);
        let sp = &self.inner;
        let z0 = match z0 {
            Some((x, y, l)) => SaddlePoint::new(
                Vector::new(x).map_err(py_err)?,
                Vector::new(y).map_err(py_err)?,
                Vector::new(l).map_err(py_err)?,
            ),
            None => SaddlePoint::new(Vector::filled(sp.n(), 1.0), Vector::zeros(sp.q()), Vector::zeros(sp.m())),
        };
        let sp = sp.clone();
        let r = py.detach(move || bench::run_on_saddle(&sp, name, &params, &z0, parallel)).map_err(py_err)?;
        Ok(r.into())
    }
}

/// `Prox_{τ‖·‖₁}(v)`, i.e. soft thresholding at `τ`.
#[pyfunction]
fn l1_prox(v: Vec<f64>, tau: f64) -> PyResult<Vec<f64>> {
    Ok(prox::l1_prox(&v, tau).map_err(py_err)?.into_inner())
}

/// Projection onto the box `[lo, hi]`.
#[pyfunction]
fn box_prox(v: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(prox::indicator_box_prox(&v, &lo, &hi).map_err(py_err)?.into_inner())
}

/// Power-iteration estimate of `‖A‖₂`.
#[pyfunction]
#[pyo3(signature = (a, tol=1e-10, max_iter=5000))]
fn spectral_norm(a: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<f64> {
    Ok(spectral_norm_estimate(&matrix(a)?, tol, max_iter).map_err(py_err)?.value)
}

#[pymodule]
fn mgvi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySolverParams>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyLasso>()?;
    m.add_class::<PyTwoBlock>()?;
    m.add_function(wrap_pyfunction!(l1_prox, m)?)?;
    m.add_function(wrap_pyfunction!(box_prox, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_norm, m)?)?;
    Ok(())
}
