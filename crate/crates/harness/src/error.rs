use phaseless_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("partial results: {failed} of {total} rows failed")]
    Partial { failed: usize, total: usize },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    /// CLI exit code: 0 success, 2 config error, 3 partial results,
    /// 4 numerical failure, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(CoreError::Config(_)) => 2,
            HarnessError::Partial { .. } | HarnessError::Core(CoreError::Partial { .. }) => 3,
            HarnessError::Core(
                CoreError::Solver(_)
                | CoreError::NearSingular { .. }
                | CoreError::NonFinite(_)
                | CoreError::Coverage { .. }
                | CoreError::Resolution(_)
                | CoreError::OutOfBall { .. },
            ) => 4,
            HarnessError::InsufficientData(_) => 2,
            HarnessError::Core(CoreError::InvalidParameter(_) | CoreError::Domain(_)) => 2,
            _ => 1,
        }
    }
}
