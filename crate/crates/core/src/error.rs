use std::path::PathBuf;

/// Errors raised by grid construction, operators and the claim harness.
#[derive(Debug, thiserror::Error)]
pub enum CzError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("scale error: {0}")]
    Scale(String),
    #[error("support error: {0}")]
    Support(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },
    #[error("unknown claim `{id}`; registered claims: {}", registered.join(", "))]
    UnknownClaim { id: String, registered: Vec<String> },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CzError>;

impl CzError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CzError::Io { path: path.into(), source }
    }
}
