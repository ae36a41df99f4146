use std::path::PathBuf;
use thiserror::Error;

/// Failure of one command, carrying its process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read config {path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
}

impl CliError {
    /// 1 for failed verification, 2 for bad input, 3 for I/O failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::VerifyFailed(_) => 1,
            Self::Usage(_) | Self::Config { .. } => 2,
            Self::Io { .. } => 3,
        }
    }
}

impl From<poisson_waves::Error> for CliError {
    fn from(e: poisson_waves::Error) -> Self {
        match e {
            poisson_waves::Error::Io(source) => Self::Io { path: PathBuf::new(), source },
            other => Self::Usage(other.to_string()),
        }
    }
}
