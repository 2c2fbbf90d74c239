//! Solvers for monotone generalized variational inequalities
//! `MGVI(θ, F)`: find `x*` with `θ(x) − θ(x*) + (x − x*)ᵀF(x*) ≥ 0` for all
//! `x`, where `θ` is closed proper convex with a cheap proximity operator
//! and `F` is monotone.
//!
//! ```
//! use std::sync::Arc;
//! use mgvi::problem::{MgviProblem, MonotoneOperator};
//! use mgvi::prox::L1Norm;
//! use mgvi::solvers::{solve_gem, SolverParams};
//!
//! // |x| + F(x) = x − 3 is solved by x = 2
//! let p = MgviProblem::new(
//!     Arc::new(L1Norm::new(1.0).unwrap()),
//!     MonotoneOperator::general(1, |x, out| out[0] = x[0] - 3.0),
//! )
//! .unwrap();
//! let r = solve_gem(&p, &SolverParams::default(), &[0.0]).unwrap();
//! assert!((r.x_final[0] - 2.0).abs() < 1e-6);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod prox;
pub mod problem;
pub mod solvers;
pub mod saddle;
pub mod lasso;
pub mod baselines;
pub mod bench;

pub use error::{MgviError, Result};
