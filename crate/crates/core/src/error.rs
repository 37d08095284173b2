use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid Lagrangian frame: {0}")]
    InvalidFrame(String),

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("function is not polyradial (relative deviation {deviation:.3e})")]
    NotPolyradial { deviation: f64 },

    #[error("quadrature did not reach tolerance (estimated error {achieved:.3e})")]
    Quadrature { achieved: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
