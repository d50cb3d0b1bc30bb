use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model limit exceeded: {kind} models support size <= {max}, got {size}")]
    ModelLimit { kind: &'static str, max: usize, size: usize },
    #[error("operands belong to different models")]
    ModelMismatch,
    #[error("events are not orthogonal (|PQ| = {overlap:e})")]
    NotOrthogonal { overlap: f64 },
    #[error("rank {rank} out of range for size {size}")]
    RankOutOfRange { rank: usize, size: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("conditioning on an event of probability {probability:e}")]
    ConditioningOnNull { probability: f64 },
    #[error("spanning family did not reach full rank after {trials} attempts")]
    DegenerateSpanningFamily { trials: usize },
    #[error("events are equal within tolerance; no separating state exists")]
    EventsEqual,
    #[error("observable norm {norm} exceeds 1")]
    NormExceedsOne { norm: f64 },
    #[error("unknown check id `{0}`")]
    UnknownCheckId(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed witness: {0}")]
    Witness(String),
}
