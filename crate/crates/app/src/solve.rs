//! Requests and results shared by the command line and the HTTP API.

use indexmap::IndexMap;
use morphsynth::{
    compose_part, exact_pack, greedy_pack, lambda_order, rank, synthesize, trajectories, what_if, ChangeCostConfig,
    KnapsackOrdering, Overrides, ParetoSet, PriorityAssignment, ProblemDocument, RankingConfig, RankingMethod, Selection,
    Trajectory, WhatIfDelta,
};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RankRequest {
    /// Scenario whose weights (and, for the external method, priorities) apply.
    pub scenario: Option<String>,
    /// Restrict to one leaf; all leaves otherwise.
    pub node: Option<String>,
    pub config: RankingConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub method: RankingMethod,
    pub leaves: IndexMap<String, PriorityAssignment>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComposeRequest {
    pub scenario: Option<String>,
    /// Node to compose; the root when absent.
    pub node: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeResult {
    pub scenario: String,
    pub pareto: ParetoSet,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnapsackSolver {
    #[default]
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackRequest {
    pub budget: u64,
    #[serde(default)]
    pub solver: KnapsackSolver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackResult {
    pub solver: KnapsackSolver,
    pub budget: u64,
    pub ordering: KnapsackOrdering,
    pub selection: Selection,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryRequest {
    pub config: Option<ChangeCostConfig>,
    /// Return every feasible trajectory instead of the Pareto set.
    pub all: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryResult {
    pub stages: Vec<String>,
    pub config: ChangeCostConfig,
    pub trajectories: Vec<Trajectory>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WhatIfRequest {
    pub scenario: Option<String>,
    pub node: Option<String>,
    pub overrides: Overrides,
}

pub fn run_rank(doc: &ProblemDocument, req: &RankRequest) -> Result<RankResult, AppError> {
    let (model, external) = match &req.scenario {
        Some(name) => (doc.scenario_model(name)?, Some(doc.priorities(name)?)),
        None => (doc.to_model(), doc.scenarios.first().map(|s| &s.priorities)),
    };
    let leaves: Vec<String> = match &req.node {
        Some(id) => vec![model.leaf(id)?.id.clone()],
        None => model.root.leaves().into_iter().map(|l| l.id.clone()).collect(),
    };
    let leaves = leaves
        .into_iter()
        .map(|id| {
            let given = external.and_then(|p| p.get(&id));
            Ok((id.clone(), rank(&model, &id, &req.config, given)?))
        })
        .collect::<Result<_, AppError>>()?;
    Ok(RankResult { method: req.config.method, leaves })
}

pub fn run_compose(doc: &ProblemDocument, req: &ComposeRequest) -> Result<ComposeResult, AppError> {
    let scenario = doc.scenario_or_default(req.scenario.as_deref())?;
    let model = doc.to_model();
    let node = req.node.as_deref().unwrap_or(&model.root.id);
    let pareto = compose_part(&model, node, &scenario.priorities)?;
    Ok(ComposeResult { scenario: scenario.name.clone(), pareto })
}

pub fn run_knapsack(doc: &ProblemDocument, req: &KnapsackRequest) -> Result<KnapsackResult, AppError> {
    let items = doc.knapsack_items()?;
    let ordering = lambda_order(&items)?;
    let selection = match req.solver {
        KnapsackSolver::Exact => exact_pack(&items, &ordering.lambdas(), req.budget)?,
        KnapsackSolver::Greedy => greedy_pack(&ordering, &items, req.budget)?,
    };
    Ok(KnapsackResult { solver: req.solver, budget: req.budget, ordering, selection })
}

pub fn run_trajectory(doc: &ProblemDocument, req: &TrajectoryRequest) -> Result<TrajectoryResult, AppError> {
    let stages = doc.stage_specs()?;
    let config = req.config.clone().unwrap_or_default();
    let model = doc.to_model();
    let found = if req.all { trajectories(&model, &stages, &config)? } else { synthesize(&model, &stages, &config)? };
    Ok(TrajectoryResult { stages: stages.into_iter().map(|s| s.label).collect(), config, trajectories: found })
}

pub fn run_what_if(doc: &ProblemDocument, req: &WhatIfRequest) -> Result<WhatIfDelta, AppError> {
    let scenario = doc.scenario_or_default(req.scenario.as_deref())?;
    Ok(what_if(&doc.to_model(), &scenario.priorities, req.node.as_deref(), &req.overrides)?)
}
