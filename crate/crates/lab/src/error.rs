use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error at '{pointer}': {message}")]
    Config { pointer: String, message: String },
    #[error("unknown scenario `{0}`; valid names: {1}")]
    UnknownScenario(String, String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] hyperent::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config { pointer: pointer.into(), message: message.into() }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } | LabError::UnknownScenario(..) => 2,
            _ => 3,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
