use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Topology not served by the requested operation.
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    /// Quadrature or series did not reach the requested tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Rational reconstruction residual too large; signals a precision or
    /// measure-convention bug upstream.
    #[error("reconstruction failure: {0}")]
    Reconstruction(String),

    /// Doubly-exponential sequence left the representable range.
    #[error("overflow guard: {0}")]
    Overflow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
