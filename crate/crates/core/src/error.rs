use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or state outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mesh construction or validation failure.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// The constrained Poisson solve did not meet its residual tolerance.
    #[error("solver failure: relative residual {residual:e} exceeds {tolerance:e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    /// The grid reference solution violated one of its own integrity bounds.
    #[error("oracle integrity: {0}")]
    OracleIntegrity(String),

    /// Malformed scenario configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn mesh(msg: impl Into<String>) -> Self {
        Error::Mesh(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
