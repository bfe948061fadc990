//! Ordinal layering of design alternatives from multicriteria estimates.
//!
//! Two layering rules are provided: iterative peeling of the Pareto
//! dominance relation, and a weighted concordance/discordance outranking
//! relation whose cycles are condensed before peeling. Externally supplied
//! priorities pass straight through.

use petgraph::algo::condensation;
use petgraph::graph::DiGraph;
use petgraph::visit::EdgeRef;
use petgraph::Direction;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{orient_estimates, MorphModel, PriorityAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RankingMethod {
    #[default]
    DominanceLayers,
    WeightedOutranking,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RankingConfig {
    pub method: RankingMethod,
    pub concordance_threshold: f64,
    pub discordance_threshold: f64,
    pub max_layers: u32,
}

impl Default for RankingConfig {
    fn default() -> Self {
        Self { method: RankingMethod::DominanceLayers, concordance_threshold: 0.6, discordance_threshold: 0.5, max_layers: 3 }
    }
}

impl RankingConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !in_unit(self.concordance_threshold) || !in_unit(self.discordance_threshold) {
            return Err(Error::InvalidConfig("thresholds must lie in [0,1]".into()));
        }
        if self.max_layers == 0 {
            return Err(Error::InvalidConfig("max_layers must be at least 1".into()));
        }
        Ok(())
    }
}

/// `a` strictly dominates `b`: componentwise `>=` with at least one `>`.
fn dominates(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Peel nondominated fronts: front 1 is every item no other item strictly
/// dominates, then remove it and repeat. Fronts past `k` share layer `k`.
pub fn dominance_layers(oriented: &[Vec<i64>], k: u32) -> Result<Vec<u32>> {
    if oriented.is_empty() {
        return Err(Error::EmptyInput("no items to rank"));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("layer count must be at least 1".into()));
    }
    let width = oriented[0].len();
    if let Some(r) = oriented.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch { expected: width, actual: r.len() });
    }
    let n = oriented.len();
    let edges = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && dominates(&oriented[a], &oriented[b]));
    Ok(peel(n, edges).into_iter().map(|l| l.min(k)).collect())
}

/// Longest-path layering of an acyclic relation: an item's layer is one more
/// than the deepest item that beats it.
fn peel(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<u32> {
    let mut beaten_by = vec![0usize; n];
    let mut beats = vec![Vec::new(); n];
    for (a, b) in edges {
        beats[a].push(b);
        beaten_by[b] += 1;
    }
    let mut layer = vec![0u32; n];
    let mut front: Vec<usize> = (0..n).filter(|&i| beaten_by[i] == 0).collect();
    let mut depth = 1;
    while !front.is_empty() {
        let mut next = Vec::new();
        for &i in &front {
            layer[i] = depth;
            for &j in &beats[i] {
                beaten_by[j] -= 1;
                if beaten_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        front = next;
        depth += 1;
    }
    debug_assert!(layer.iter().all(|&l| l > 0), "relation must be acyclic");
    layer
}

/// Concordance share and normalized discordance of `a` against `b`.
pub fn outranking_indices(a: &[i64], b: &[i64], weights: &[u32], ranges: &[i64]) -> (f64, f64) {
    let total: u32 = weights.iter().sum();
    let agree: u32 = a.iter().zip(b).zip(weights).filter(|((x, y), _)| x >= y).map(|(_, &w)| w).sum();
    let discord = a
        .iter()
        .zip(b)
        .zip(ranges)
        .map(|((&x, &y), &r)| if r == 0 || y <= x { 0.0 } else { (y - x) as f64 / r as f64 })
        .fold(0.0, f64::max);
    let conc = if total == 0 { 1.0 } else { f64::from(agree) / f64::from(total) };
    (conc, discord)
}

/// Layering from a weighted outranking relation. `a` outranks `b` when the
/// weight share of criteria with `a >= b` reaches the concordance threshold
/// and no criterion shows `b` ahead by more than the discordance threshold
/// (gap normalized by the column range). Outranking cycles collapse into
/// one class, then the class graph is peeled.
pub fn outrank_layers(oriented: &[Vec<i64>], weights: &[u32], config: &RankingConfig) -> Result<Vec<u32>> {
    config.validate()?;
    if oriented.is_empty() {
        return Err(Error::EmptyInput("no items to rank"));
    }
    let width = weights.len();
    if let Some(r) = oriented.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch { expected: width, actual: r.len() });
    }
    let ranges: Vec<i64> = (0..width)
        .map(|j| {
            let col = oriented.iter().map(|r| r[j]);
            col.clone().max().unwrap_or(0) - col.min().unwrap_or(0)
        })
        .collect();

    let n = oriented.len();
    let mut g = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (c, d) = outranking_indices(&oriented[a], &oriented[b], weights, &ranges);
            if c >= config.concordance_threshold && d <= config.discordance_threshold {
                g.add_edge(nodes[a], nodes[b], ());
            }
        }
    }

    let classes = condensation(g, true);
    let mut class_of = vec![0usize; n];
    for idx in classes.node_indices() {
        for &item in &classes[idx] {
            class_of[item] = idx.index();
        }
    }
    let edges: Vec<_> = classes
        .node_indices()
        .flat_map(|i| classes.edges_directed(i, Direction::Outgoing).map(|e| (e.source().index(), e.target().index())))
        .collect();
    let class_layer = peel(classes.node_count(), edges.into_iter());
    Ok(class_of.iter().map(|&c| class_layer[c].min(config.max_layers)).collect())
}

/// Priority assignment for one leaf of the model.
pub fn rank(
    model: &MorphModel,
    leaf: &str,
    config: &RankingConfig,
    external: Option<&PriorityAssignment>,
) -> Result<PriorityAssignment> {
    config.validate()?;
    let node = model.leaf(leaf)?;
    if node.alternatives.is_empty() {
        return Err(Error::EmptyInput("leaf has no alternatives"));
    }
    let ids = node.alternatives.iter().map(|a| a.id.clone());
    let layers = match config.method {
        RankingMethod::External => {
            let given = external.ok_or_else(|| Error::MissingPriorities(leaf.to_string()))?;
            return node
                .alternatives
                .iter()
                .map(|a| {
                    let r = *given.get(&a.id).ok_or_else(|| Error::MissingPriorities(format!("{leaf}/{}", a.id)))?;
                    if r == 0 || r > config.max_layers {
                        return Err(Error::PriorityOutOfRange {
                            alternative: format!("{leaf}/{}", a.id),
                            value: r,
                            layers: config.max_layers,
                        });
                    }
                    Ok((a.id.clone(), r))
                })
                .collect();
        }
        RankingMethod::DominanceLayers => {
            let rows: Vec<_> = node.alternatives.iter().map(|a| a.estimates.clone()).collect();
            dominance_layers(&orient_estimates(&rows, &model.criteria)?, config.max_layers)?
        }
        RankingMethod::WeightedOutranking => {
            let rows: Vec<_> = node.alternatives.iter().map(|a| a.estimates.clone()).collect();
            let weights: Vec<u32> = model.criteria.iter().map(|c| c.weight.unsigned_abs()).collect();
            outrank_layers(&orient_estimates(&rows, &model.criteria)?, &weights, config)?
        }
    };
    Ok(ids.zip(layers).collect())
}
