use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] couette_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("unknown suite id `{0}`")]
    UnknownSuite(String),
    #[error("bisection: {0}")]
    Bisection(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
