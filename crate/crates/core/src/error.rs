use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("probe out of ball: |p| = {p_norm} exceeds 2*sqrt(E) = {limit}")]
    OutOfBall { p_norm: f64, limit: f64 },

    #[error("near-singular determinant: |zeta| = {zeta:e} below floor {floor:e}")]
    NearSingular { zeta: f64, floor: f64 },

    #[error("missing record: {0}")]
    MissingRecord(String),

    #[error("coverage error: {missing} of {total} quadrature targets absent from dataset")]
    Coverage { missing: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("partial results: {failed} of {total} records failed")]
    Partial { failed: usize, total: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
