use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value} outside constraint interval (-{lower}, {upper}) or within guard distance")]
    OutOfBounds { value: f64, lower: f64, upper: f64 },

    #[error("invalid constraint bounds (-{lower}, {upper}): both limits must be positive and finite")]
    InvalidBounds { lower: f64, upper: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("transform gain {0} is degenerate (must be > 1e-12)")]
    DegenerateGain(f64),

    #[error("event time {now} precedes last event at {last}")]
    NonMonotonicTime { now: f64, last: f64 },

    #[error("invalid configuration: {}", format_issues(.0))]
    ConfigInvalid(Vec<ConfigIssue>),

    #[error("unknown plant model `{0}`")]
    UnknownPlant(String),

    #[error("state {state} left its constraint interval at t = {t}")]
    ConstraintViolation { t: f64, state: usize },

    #[error("non-finite value in closed-loop state at t = {t}")]
    NumericalDivergence { t: f64 },
}

/// A single config lint failure, keyed by the dotted config field name.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: String,
    pub reason: String,
}

impl ConfigIssue {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { field: field.into(), reason: reason.into() }
    }
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("{}: {}", i.field, i.reason))
        .collect::<Vec<_>>()
        .join("; ")
}
