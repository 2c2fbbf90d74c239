use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MgviError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The solver cannot run on the operator structure it was given.
    #[error("solver not applicable: {0}")]
    NotApplicable(String),

    /// The β shrink loop ran out of budget inside one iteration.
    #[error("step size search gave up after {backtracks} shrinks (beta = {beta:e})")]
    BacktrackExhausted { backtracks: usize, beta: f64 },

    #[error("no closed-form subproblem solver: {0}")]
    NoClosedForm(String),
}

pub type Result<T> = std::result::Result<T, MgviError>;

macro_rules! ensure_dims {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::MgviError::DimensionMismatch(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_dims;
