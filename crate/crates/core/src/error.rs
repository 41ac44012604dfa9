use crate::numkit::NumError;

/// Errors surfaced by the geometric layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0}")]
    Range(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("unknown space '{0}'")]
    UnknownSpace(String),
    #[error("invalid parameter '{name}': {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("no eigenvalue bracket found below {cap}")]
    BracketNotFound { cap: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
