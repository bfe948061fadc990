use morphsynth::{DocumentError, Error};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How a failure is reported: CLI exit code and HTTP status follow from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureClass {
    /// The problem document is malformed or violates model invariants.
    InvalidProblem,
    /// The request itself is wrong: unknown scenario, node, bad body.
    BadRequest,
    /// The instance is well formed but has no feasible answer.
    Infeasible,
    NotFound,
    Conflict,
    Io,
}

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Document(#[from] DocumentError),

    #[error(transparent)]
    Solver(Error),

    #[error("{0}")]
    BadRequest(String),

    #[error("unknown problem `{0}`")]
    NotFound(String),

    #[error("stale revision: expected {current}, got {given}")]
    Conflict { current: u64, given: u64 },

    #[error("{0}")]
    Io(String),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::Document(d) => AppError::Document(d),
            other => AppError::Solver(other),
        }
    }
}

impl AppError {
    pub fn class(&self) -> FailureClass {
        match self {
            AppError::Document(_) => FailureClass::InvalidProblem,
            AppError::Solver(Error::InvalidModel(_)) => FailureClass::InvalidProblem,
            AppError::Solver(Error::Infeasible(_) | Error::InfeasibleBudget { .. } | Error::NoTrajectory) => {
                FailureClass::Infeasible
            }
            AppError::Solver(_) | AppError::BadRequest(_) => FailureClass::BadRequest,
            AppError::NotFound(_) => FailureClass::NotFound,
            AppError::Conflict { .. } => FailureClass::Conflict,
            AppError::Io(_) => FailureClass::Io,
        }
    }

    /// Structured diagnostics, when the failure has any.
    pub fn details(&self) -> Option<serde_json::Value> {
        match self {
            AppError::Document(DocumentError::Schema { path, line, column, .. }) => {
                Some(serde_json::json!({ "path": path, "line": line, "column": column }))
            }
            AppError::Document(DocumentError::Syntax { line, column, .. }) => {
                Some(serde_json::json!({ "line": line, "column": column }))
            }
            AppError::Document(DocumentError::Invalid(v)) | AppError::Solver(Error::InvalidModel(v)) => {
                Some(serde_json::json!({ "violations": v }))
            }
            AppError::Solver(Error::Infeasible(node)) => serde_json::to_value(node).ok(),
            AppError::Solver(Error::InfeasibleBudget { budget, minimum }) => {
                Some(serde_json::json!({ "budget": budget, "minimum": minimum }))
            }
            AppError::Conflict { current, given } => Some(serde_json::json!({ "current": current, "given": given })),
            _ => None,
        }
    }

    /// Longer human-readable text: the message plus any listed diagnostics.
    pub fn report(&self) -> String {
        let mut out = format!("error: {self}\n");
        match self {
            AppError::Document(DocumentError::Invalid(v)) | AppError::Solver(Error::InvalidModel(v)) => {
                out.push_str(&morphsynth::report::violations_table(v));
            }
            AppError::Solver(Error::Infeasible(node)) if !node.zero_pairs.is_empty() => {
                out.push_str(&format!("zero pairs: {}\n", morphsynth::report::bottleneck_list(&node.zero_pairs)));
            }
            _ => {}
        }
        out
    }
}

/// Body of every non-2xx API response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: FailureClass,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl From<&AppError> for ErrorBody {
    fn from(e: &AppError) -> Self {
        Self { error: e.class(), message: e.to_string(), details: e.details() }
    }
}
