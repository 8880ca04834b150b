use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    #[error("index {index} out of range (limit {limit}) in {context}")]
    IndexOutOfRange {
        index: usize,
        limit: usize,
        context: String,
    },

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("invalid Lie algebra data: {0}")]
    InvalidAlgebra(String),

    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),

    #[error("operation requires exact polynomial coefficients: {0}")]
    ExactModeRequired(String),

    #[error("jet arithmetic error: {0}")]
    Jet(String),

    #[error("bidifferential extraction failed: {0}")]
    Extraction(String),

    #[error("twistor is not unital at order zero: {0}")]
    NonUnital(String),

    #[error("classical limit is not of bivector type: {0}")]
    NotBivector(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
