use thiserror::Error;

/// Errors produced by graph loading, cost modeling, sweeps and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown device profile `{0}`")]
    UnknownProfile(String),

    #[error("cut point does not belong to graph `{0}`")]
    CutMismatch(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("model has no valid cut points")]
    NoCutPoints,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("missing group: {0}")]
    MissingGroup(String),

    #[error("malformed scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
