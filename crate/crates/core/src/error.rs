use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum RmlError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed request (empty grids, inconsistent parameters).
    #[error("usage error: {0}")]
    Usage(String),
    /// Quadrature, fitting or consistency diagnostics failed.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A construction precondition failed (e.g. a bump vanishing on the annulus).
    #[error("construction error: {0}")]
    Construction(String),
    /// A structural invariant or frozen regression bound was violated.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RmlError {
    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            RmlError::Domain(_) | RmlError::Usage(_) | RmlError::Parse(_) | RmlError::Io(_) => 1,
            RmlError::Numerical(_) | RmlError::Construction(_) => 2,
            RmlError::Invariant(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, RmlError>;
