use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("algebra error: {0}")]
    Algebra(String),

    #[error("norm too small to normalize (impossible outcome?)")]
    ZeroNorm,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario is invalid:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<crate::scenario::Violation>),

    #[error("query error: {0}")]
    Query(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
