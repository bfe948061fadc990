//! Multistage design: solve each planning stage with its own priorities,
//! then compose one decision per stage into a trajectory whose
//! "compatibility" between consecutive stages reflects how many components
//! must be swapped.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::composition::{
    compose_tree, dominates_quality, quality_layers, CompositeDecision, Dominance, ParetoSet, QualityVector,
};
use crate::error::{Error, Result};
use crate::model::{MorphModel, Priorities};

/// One planning stage: a label and the priorities in force at that stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub label: String,
    pub priorities: Priorities,
}

impl StageSpec {
    pub fn new(label: impl Into<String>, priorities: Priorities) -> Self {
        Self { label: label.into(), priorities }
    }
}

/// Change counts up to `max_changes` map to `compat`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeThreshold {
    pub max_changes: usize,
    pub compat: u32,
}

/// Ordinal compatibility of a stage transition as a step function of the
/// number of changed components. Counts above the last threshold map to 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeCostConfig {
    pub thresholds: Vec<ChangeThreshold>,
}

impl Default for ChangeCostConfig {
    fn default() -> Self {
        let t = |max_changes, compat| ChangeThreshold { max_changes, compat };
        Self { thresholds: vec![t(0, 3), t(2, 2), t(4, 1)] }
    }
}

impl ChangeCostConfig {
    pub fn validate(&self, compat_max: u32) -> Result<()> {
        for pair in self.thresholds.windows(2) {
            if pair[1].max_changes <= pair[0].max_changes {
                return Err(Error::InvalidConfig("change thresholds must be strictly increasing".into()));
            }
            if pair[1].compat > pair[0].compat {
                return Err(Error::InvalidConfig("compatibility must not increase with more changes".into()));
            }
        }
        if let Some(t) = self.thresholds.iter().find(|t| t.compat > compat_max) {
            return Err(Error::InvalidConfig(format!("compatibility {} exceeds scale maximum {compat_max}", t.compat)));
        }
        Ok(())
    }

    pub fn compat(&self, changes: usize) -> u32 {
        self.thresholds.iter().find(|t| changes <= t.max_changes).map_or(0, |t| t.compat)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub changes: usize,
    pub compat: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub picks: Vec<CompositeDecision>,
    pub quality: QualityVector,
    pub transitions: Vec<Transition>,
}

impl Trajectory {
    pub fn labels(&self) -> Vec<String> {
        self.picks.iter().map(CompositeDecision::label).collect()
    }
}

/// Pareto sets of every node under the stage's priorities.
pub fn stage_solve(model: &MorphModel, stage: &StageSpec) -> Result<IndexMap<String, ParetoSet>> {
    compose_tree(model, &stage.priorities)
}

/// Number of parts whose chosen alternative differs.
pub fn change_count(a: &CompositeDecision, b: &CompositeDecision) -> Result<usize> {
    if a.choice.len() != b.choice.len() || a.choice.keys().any(|k| !b.choice.contains_key(k)) {
        return Err(Error::DimensionMismatch { expected: a.choice.len(), actual: b.choice.len() });
    }
    Ok(a.choice.iter().filter(|(part, alt)| b.choice[*part] != **alt).count())
}

struct StageMembers {
    decisions: Vec<CompositeDecision>,
    layers: Vec<u32>,
}

/// Compose stage root decisions into trajectories. Each stage's decisions get
/// a priority by Pareto peeling of their qualities; only consecutive stages
/// constrain each other. Returns the trajectories no other feasible
/// trajectory strictly dominates.
pub fn synthesize(model: &MorphModel, stages: &[StageSpec], config: &ChangeCostConfig) -> Result<Vec<Trajectory>> {
    let all = trajectories(model, stages, config)?;
    let keep: Vec<bool> = all
        .iter()
        .map(|t| !all.iter().any(|u| dominates_quality(&u.quality, &t.quality).ok() == Some(Dominance::StrictlyDominates)))
        .collect();
    Ok(all.into_iter().zip(keep).filter_map(|(t, k)| k.then_some(t)).collect())
}

/// Every feasible trajectory (no transition mapped to 0), in stage-member
/// order.
pub fn trajectories(model: &MorphModel, stages: &[StageSpec], config: &ChangeCostConfig) -> Result<Vec<Trajectory>> {
    if stages.len() < 2 {
        return Err(Error::InvalidConfig(format!("a trajectory needs at least 2 stages, got {}", stages.len())));
    }
    config.validate(model.scales.compat_max)?;
    let k = model.scales.layers;
    let solved = stages
        .iter()
        .map(|s| {
            let mut tree = stage_solve(model, s)?;
            let root = tree.shift_remove(&model.root.id).expect("root is always composed");
            let qualities: Vec<QualityVector> = root.decisions.iter().map(|d| d.quality.clone()).collect();
            let layers = quality_layers(&qualities)?.into_iter().map(|l| l.min(k)).collect();
            Ok(StageMembers { decisions: root.decisions, layers })
        })
        .collect::<Result<Vec<_>>>()?;
    let changes: Vec<Vec<Vec<usize>>> = solved
        .windows(2)
        .map(|w| {
            w[0].decisions
                .iter()
                .map(|a| w[1].decisions.iter().map(|b| change_count(a, b)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut found: Vec<(Vec<usize>, QualityVector)> = Vec::new();
    let mut path = Vec::with_capacity(stages.len());
    extend(&solved, &changes, config, model.scales.compat_max, k, &mut path, &mut found);
    if found.is_empty() {
        return Err(Error::NoTrajectory);
    }
    Ok(found
        .into_iter()
        .map(|(path, quality)| Trajectory {
            transitions: path
                .windows(2)
                .enumerate()
                .map(|(s, w)| {
                    let c = changes[s][w[0]][w[1]];
                    Transition { changes: c, compat: config.compat(c) }
                })
                .collect(),
            picks: path.iter().enumerate().map(|(s, &i)| solved[s].decisions[i].clone()).collect(),
            quality,
        })
        .collect())
}

fn extend(
    solved: &[StageMembers],
    changes: &[Vec<Vec<usize>>],
    config: &ChangeCostConfig,
    l: u32,
    k: u32,
    path: &mut Vec<usize>,
    found: &mut Vec<(Vec<usize>, QualityVector)>,
) {
    let s = path.len();
    if s == solved.len() {
        let mut n = vec![0; k as usize];
        for (stage, &i) in path.iter().enumerate() {
            n[solved[stage].layers[i] as usize - 1] += 1;
        }
        let w = (1..s).map(|t| config.compat(changes[t - 1][path[t - 1]][path[t]])).min().unwrap_or(l);
        found.push((path.clone(), QualityVector::new(w, n)));
        return;
    }
    for i in 0..solved[s].decisions.len() {
        if s > 0 && config.compat(changes[s - 1][path[s - 1]][i]) == 0 {
            continue;
        }
        path.push(i);
        extend(solved, changes, config, l, k, path, found);
        path.pop();
    }
}
