use std::path::PathBuf;

use thiserror::Error;

use crate::ed::EdError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("output {0} already exists (pass --force to overwrite)")]
    Collision(PathBuf),
    #[error("missing input {0}")]
    MissingInput(PathBuf),
    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("unknown recipe `{0}`")]
    UnknownRecipe(String),
    #[error(transparent)]
    Core(#[from] echolab_core::Error),
    #[error(transparent)]
    Ed(#[from] EdError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type LabResult<T> = Result<T, LabError>;

pub(crate) fn config_err(field: impl Into<String>, reason: impl Into<String>) -> LabError {
    LabError::Config {
        field: field.into(),
        reason: reason.into(),
    }
}
