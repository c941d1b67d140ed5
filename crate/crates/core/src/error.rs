use thiserror::Error;

pub type Result<T, E = FifError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FifError {
    #[error("invalid interpolation data: {0}")]
    InvalidData(String),

    #[error("scaling factor of branch {branch} is {alpha}; |alpha| must be < 1")]
    InvalidScaling { branch: usize, alpha: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("too few scales: {0}")]
    TooFewScales(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
