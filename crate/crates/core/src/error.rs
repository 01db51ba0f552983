use serde::Serialize;
use thiserror::Error;

use crate::model::{Category, ParameterId};

/// A single validation failure on an input record. Every variant names the
/// field it concerns, see [`Violation::path`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{field}: missing")]
    MissingField { field: String },
    #[error("{field}: text must be non-empty")]
    EmptyText { field: String },
    #[error("{field}: unknown parameter {value:?}")]
    UnknownParameter { field: String, value: String },
    #[error("{field}: parameter {parameter} listed twice")]
    DuplicateParameter {
        field: String,
        parameter: ParameterId,
    },
    #[error("{field}: unknown polarity {value:?} (expected \"aligned\" or \"opposed\")")]
    UnknownPolarity { field: String, value: String },
    #[error("polarity: keys {polarity} must equal press {press}")]
    PolarityPressMismatch { press: Category, polarity: Category },
    #[error("justification.{parameter}: value {value} outside 1..5")]
    ValueOutOfRange { parameter: ParameterId, value: i64 },
    #[error("justification.{parameter}: missing")]
    MissingParameter { parameter: ParameterId },
    #[error("response: unknown response {value:?} (expected \"yes\" or \"no\")")]
    UnknownResponse { value: String },
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
}

impl Violation {
    /// Dotted path of the offending field.
    pub fn path(&self) -> String {
        match self {
            Self::MissingField { field }
            | Self::EmptyText { field }
            | Self::UnknownParameter { field, .. }
            | Self::DuplicateParameter { field, .. }
            | Self::UnknownPolarity { field, .. } => field.clone(),
            Self::PolarityPressMismatch { .. } => "polarity".into(),
            Self::ValueOutOfRange { parameter, .. } | Self::MissingParameter { parameter } => {
                format!("justification.{parameter}")
            }
            Self::UnknownResponse { .. } => "response".into(),
            Self::Malformed { path, .. } => path.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::MissingField { .. } => "missing_field",
            Self::EmptyText { .. } => "empty_text",
            Self::UnknownParameter { .. } => "unknown_parameter",
            Self::DuplicateParameter { .. } => "duplicate_parameter",
            Self::UnknownPolarity { .. } => "unknown_polarity",
            Self::PolarityPressMismatch { .. } => "polarity_press_mismatch",
            Self::ValueOutOfRange { .. } => "value_out_of_range",
            Self::MissingParameter { .. } => "missing_parameter",
            Self::UnknownResponse { .. } => "unknown_response",
            Self::Malformed { .. } => "malformed",
        }
    }

    pub fn prefixed(self, prefix: &str) -> ViolationReport {
        let mut report = ViolationReport::from(&self);
        report.path = if report.path.is_empty() {
            prefix.to_owned()
        } else {
            format!("{prefix}.{}", report.path)
        };
        report
    }
}

/// Serializable form of a [`Violation`] for API bodies and CLI JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub path: String,
    pub kind: &'static str,
    pub message: String,
}

impl From<&Violation> for ViolationReport {
    fn from(v: &Violation) -> Self {
        Self {
            path: v.path(),
            kind: v.kind(),
            message: v.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("disposition for agent {found} cannot be recorded into the profile of {expected}")]
    AgentMismatch { expected: String, found: String },
    #[error("verdict was not computed for scenario {scenario} and the given feedback")]
    VerdictMismatch { scenario: String },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("feedback is for scenario {got:?}, session expects {expected:?}")]
    WrongScenario { expected: String, got: String },
    #[error("session {0} is complete")]
    SessionComplete(String),
    #[error("feedback agent {got} does not own session (agent {expected})")]
    WrongAgent { expected: String, got: String },
    #[error("unknown {kind} {id:?}")]
    NotFound { kind: &'static str, id: String },
    #[error("corpus error: {}", join(.0))]
    Corpus(Vec<crate::corpus::CorpusError>),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn schema<E: std::fmt::Display>(err: serde_path_to_error::Error<E>) -> Self {
        let path = err.path().to_string();
        Self::SchemaViolation {
            path: if path == "." {
                "$".into()
            } else {
                format!("$.{path}")
            },
            message: err.inner().to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
