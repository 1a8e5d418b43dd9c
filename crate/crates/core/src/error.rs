use thiserror::Error;

/// Errors produced by the thermal model, quadrature tables and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("quadrature order {requested} exceeds cap {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("non-finite integrand value {value} at node {node}")]
    Numerical { node: f64, value: f64 },

    #[error("LUT build failed: {0}")]
    Build(String),

    #[error("LUT format: {0}")]
    Format(String),

    #[error("audit failed: {0}")]
    Audit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
