use thiserror::Error;

use crate::composition::InfeasibleNode;
use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model has {} violation(s); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidModel(Vec<Violation>),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("`{0}` is not a leaf part")]
    NotALeaf(String),

    #[error("unknown alternative `{alternative}` in part `{part}`")]
    UnknownAlternative { part: String, alternative: String },

    #[error("no compatibility defined between parts `{0}` and `{1}`")]
    UnknownPair(String, String),

    #[error("missing priorities for part `{0}`")]
    MissingPriorities(String),

    #[error("priority {value} for `{alternative}` outside [1..{layers}]")]
    PriorityOutOfRange { alternative: String, value: u32, layers: u32 },

    #[error("value {value} outside [{min}..{max}]")]
    OutOfRange { value: i64, min: i64, max: i64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quality vectors are not comparable: {0}")]
    Incommensurable(String),

    #[error("no feasible combination at node `{}`", .0.node)]
    Infeasible(Box<InfeasibleNode>),

    #[error("budget {budget} is below the cheapest feasible total {minimum}")]
    InfeasibleBudget { budget: u64, minimum: u64 },

    #[error("no feasible trajectory: every stage transition maps to zero compatibility")]
    NoTrajectory,

    #[error("nonpositive cost for item `{0}`")]
    NonpositiveCost(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Document(#[from] crate::document::DocumentError),
}
