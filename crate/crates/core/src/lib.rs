//! Hierarchical morphological design.
//!
//! A system is a tree of parts; each leaf part has design alternatives scored
//! on ordinal criteria, and pairs of alternatives from different parts carry
//! ordinal compatibility estimates. The crate
//!
//! * ranks alternatives into priority layers ([`ranking`]),
//! * composes one alternative per part into Pareto-efficient composite
//!   decisions under the lattice-valued quality `N(S) = (w; n)`
//!   ([`composition`]),
//! * selects one alternative per part under a budget ([`mckp`]),
//! * plans decisions across several stages ([`trajectory`]),
//! * and reads/writes JSON problem documents ([`document`], [`fixtures`]).

pub mod composition;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod mckp;
pub mod model;
pub mod ranking;
pub mod report;
pub mod trajectory;

pub use composition::{
    compose_part, compose_tree, dominates_quality, find_bottlenecks, quality_layers, quality_vector, what_if,
    what_if_improve, Bottleneck, Choice, CompatOverride, CompositeDecision, Dominance, Overrides, ParetoSet,
    PriorityOverride, QualityVector, WhatIfDelta,
};
pub use document::{parse_problem, parse_problem_str, DocumentError, ProblemDocument};
pub use error::{Error, Result};
pub use mckp::{exact_pack, greedy_pack, lambda_order, pareto_pack, KnapsackItem, KnapsackOrdering, Rational, Selection};
pub use model::{
    orient_estimates, validate_model, CompatibilityMatrix, CriterionSpec, DesignAlternative, MorphModel, MorphNode,
    Priorities, PriorityAssignment, Scales, Violation, ViolationKind,
};
pub use ranking::{dominance_layers, outrank_layers, rank, RankingConfig, RankingMethod};
pub use trajectory::{
    change_count, stage_solve, synthesize, trajectories, ChangeCostConfig, ChangeThreshold, StageSpec, Trajectory, Transition,
};
