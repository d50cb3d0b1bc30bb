use thiserror::Error;

/// Every variant maps to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violation in `{name}`: {detail}")]
    InvariantViolation { name: String, detail: String },
    #[error("unknown reference `{name}`")]
    UnknownReference { name: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qprob::Error),
}
