use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("point is not on the surface (residual {residual:e})")]
    NotOnSurface { residual: f64 },
    #[error("surface is singular at the point (gradient ratio {ratio:e})")]
    SingularPoint { ratio: f64 },
    #[error("a line through the point lies on the surface")]
    LineOnSurface,
    #[error("curves share a component")]
    CommonComponent,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("certificate check failed: {0}")]
    CertificateFailed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit-code class: 2 for mathematical preconditions and degeneracy,
    /// 3 for numerical failure, 1 for I/O and malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::CertificateFailed(_) => 3,
            Error::Json(_) | Error::Io(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. } => 1,
            _ => 2,
        }
    }
}
