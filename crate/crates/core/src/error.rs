use thiserror::Error;

/// Errors raised by kernel evaluation, estimate checks and exact verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad arguments: unsupported dimension, parameter out of range, mismatched sizes.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point that does not lie on the hyperboloid.
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// Quadrature did not reach its accuracy target.
    #[error("numerical accuracy not reached: estimated relative error {achieved:.3e} > target {target:.3e}")]
    NumericalAccuracy { achieved: f64, target: f64 },

    /// An exact coefficient check failed.
    #[error("verification failed at k = {k}: {reason}")]
    VerificationFailure { k: u64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
