//! Error type shared by all solvers and estimators.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A fixed-point or saddle solver exhausted its iteration budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Problem size outside what an exact-enumeration estimator supports.
    #[error("size error: {0}")]
    Size(String),

    /// A matrix factorization failed or a result was non-finite.
    #[error("numeric error: {0}")]
    Numeric(String),
}
