//! Problem instance: the hierarchical system model, its design alternatives,
//! criteria, ordinal scales and pairwise compatibility estimates.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Range;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A criterion whose weight sign gives the scale orientation (positive means
/// larger is better) and whose magnitude gives its importance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionSpec {
    pub name: String,
    pub weight: i32,
}

impl CriterionSpec {
    pub fn new(name: impl Into<String>, weight: i32) -> Self {
        Self { name: name.into(), weight }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignAlternative {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub estimates: Vec<i32>,
}

impl DesignAlternative {
    pub fn new(id: impl Into<String>, estimates: Vec<i32>) -> Self {
        Self { id: id.into(), label: None, estimates }
    }
}

/// A node of the system tree. Internal nodes list children, leaves list their
/// design alternatives; a node with neither is an empty leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<MorphNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<DesignAlternative>,
}

impl MorphNode {
    pub fn leaf(id: impl Into<String>, alternatives: Vec<DesignAlternative>) -> Self {
        Self { id: id.into(), children: Vec::new(), alternatives }
    }

    pub fn internal(id: impl Into<String>, children: Vec<MorphNode>) -> Self {
        Self { id: id.into(), children, alternatives: Vec::new() }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves of this subtree in depth-first order.
    pub fn leaves(&self) -> Vec<&MorphNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a MorphNode>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    pub fn find(&self, id: &str) -> Option<&MorphNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut MorphNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }
}

/// Ordinal compatibility between the alternatives of two leaf parts.
///
/// `values[i][j]` is the estimate for the i-th alternative of `part_a` and the
/// j-th alternative of `part_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatibilityMatrix {
    pub part_a: String,
    pub part_b: String,
    pub values: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scales {
    /// Number of priority layers `k`.
    pub layers: u32,
    /// Best compatibility value `l`.
    pub compat_max: u32,
    pub estimate_min: i32,
    pub estimate_max: i32,
}

impl Default for Scales {
    fn default() -> Self {
        Self { layers: 3, compat_max: 3, estimate_min: 1, estimate_max: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphModel {
    pub criteria: Vec<CriterionSpec>,
    pub root: MorphNode,
    pub compat: Vec<CompatibilityMatrix>,
    pub scales: Scales,
}

/// Priority layer of each alternative of one leaf, 1 is best.
pub type PriorityAssignment = IndexMap<String, u32>;

/// Priority assignments keyed by leaf id.
pub type Priorities = IndexMap<String, PriorityAssignment>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    ZeroWeight,
    DuplicateNodeId,
    DuplicateAlternativeId,
    EmptyLeaf,
    MixedNode,
    TooFewChildren,
    EstimateCount,
    EstimateOutOfRange,
    InvalidScales,
    UnknownPart,
    SamePart,
    DuplicatePair,
    MatrixShape,
    CompatOutOfRange,
}

/// One broken invariant, located by node, alternative or matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl MorphModel {
    pub fn new(criteria: Vec<CriterionSpec>, root: MorphNode, compat: Vec<CompatibilityMatrix>) -> Self {
        Self { criteria, root, compat, scales: Scales::default() }
    }

    /// Copy of the model with criterion weights replaced.
    pub fn with_weights(&self, weights: &[i32]) -> Result<Self> {
        if weights.len() != self.criteria.len() {
            return Err(Error::DimensionMismatch { expected: self.criteria.len(), actual: weights.len() });
        }
        let mut m = self.clone();
        for (c, &w) in m.criteria.iter_mut().zip(weights) {
            c.weight = w;
        }
        Ok(m)
    }

    pub fn weights(&self) -> Vec<i32> {
        self.criteria.iter().map(|c| c.weight).collect()
    }

    pub fn leaf(&self, id: &str) -> Result<&MorphNode> {
        let node = self.root.find(id).ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        if !node.is_leaf() {
            return Err(Error::NotALeaf(id.to_string()));
        }
        Ok(node)
    }

    pub fn matrix(&self, a: &str, b: &str) -> Option<&CompatibilityMatrix> {
        self.compat
            .iter()
            .find(|m| (m.part_a == a && m.part_b == b) || (m.part_a == b && m.part_b == a))
    }

    /// Compatibility of alternative `x` of part `a` with alternative `y` of
    /// part `b`, regardless of which way round the matrix was stored.
    /// `None` when either id is unknown or no matrix exists for the pair.
    pub fn compatibility(&self, a: &str, x: &str, b: &str, y: &str) -> Option<u32> {
        let m = self.matrix(a, b)?;
        let (ra, xa, rb, yb) = if m.part_a == a { (a, x, b, y) } else { (b, y, a, x) };
        let i = self.leaf(ra).ok()?.alternatives.iter().position(|d| d.id == xa)?;
        let j = self.leaf(rb).ok()?.alternatives.iter().position(|d| d.id == yb)?;
        m.values.get(i)?.get(j).copied()
    }

    pub fn set_compatibility(&mut self, a: &str, x: &str, b: &str, y: &str, value: u32) -> Result<()> {
        let m = self.matrix(a, b).ok_or_else(|| Error::UnknownPair(a.into(), b.into()))?;
        let (ra, xa, rb, yb) = if m.part_a == a { (a, x, b, y) } else { (b, y, a, x) };
        let (i, j) = (alt_pos(self.leaf(ra)?, xa)?, alt_pos(self.leaf(rb)?, yb)?);
        let m = self
            .compat
            .iter_mut()
            .find(|m| m.part_a == ra && m.part_b == rb)
            .expect("matrix located above");
        m.values[i][j] = value;
        Ok(())
    }

    /// Build the dense lookup index; fails with every violation when the model
    /// is invalid.
    pub fn index(&self) -> Result<ModelIndex> {
        let violations = validate_model(self);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        Ok(ModelIndex::build(self))
    }
}

fn alt_pos(leaf: &MorphNode, id: &str) -> Result<usize> {
    leaf.alternatives
        .iter()
        .position(|d| d.id == id)
        .ok_or_else(|| Error::UnknownAlternative { part: leaf.id.clone(), alternative: id.to_string() })
}

/// Check every structural and scale invariant. An empty result means the
/// model is valid.
pub fn validate_model(model: &MorphModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, location: String, message: String| out.push(Violation { kind, location, message });
    let s = model.scales;

    if s.layers == 0 || s.compat_max == 0 || s.estimate_min > s.estimate_max {
        push(
            ViolationKind::InvalidScales,
            "scales".into(),
            format!("need layers >= 1, compat_max >= 1, estimate_min <= estimate_max; got {s:?}"),
        );
    }
    for (i, c) in model.criteria.iter().enumerate() {
        if c.weight == 0 {
            push(ViolationKind::ZeroWeight, format!("criteria[{i}] `{}`", c.name), "weight must be nonzero".into());
        }
    }

    let mut seen = HashSet::new();
    let mut stack = vec![&model.root];
    while let Some(node) = stack.pop() {
        if !seen.insert(node.id.as_str()) {
            push(ViolationKind::DuplicateNodeId, format!("node `{}`", node.id), "node id is not unique".into());
        }
        if !node.children.is_empty() && !node.alternatives.is_empty() {
            push(
                ViolationKind::MixedNode,
                format!("node `{}`", node.id),
                "node has both children and alternatives".into(),
            );
        }
        if node.is_leaf() {
            if node.alternatives.is_empty() {
                push(ViolationKind::EmptyLeaf, format!("leaf `{}`", node.id), "leaf has no alternatives".into());
            }
            let mut ids = HashSet::new();
            for a in &node.alternatives {
                let loc = format!("alternative `{}/{}`", node.id, a.id);
                if !ids.insert(a.id.as_str()) {
                    push(ViolationKind::DuplicateAlternativeId, loc.clone(), "alternative id repeated in leaf".into());
                }
                if a.estimates.len() != model.criteria.len() {
                    push(
                        ViolationKind::EstimateCount,
                        loc.clone(),
                        format!("{} estimates for {} criteria", a.estimates.len(), model.criteria.len()),
                    );
                }
                for (j, &e) in a.estimates.iter().enumerate() {
                    if e < s.estimate_min || e > s.estimate_max {
                        push(
                            ViolationKind::EstimateOutOfRange,
                            loc.clone(),
                            format!("estimate {e} on criterion {} outside [{}..{}]", j + 1, s.estimate_min, s.estimate_max),
                        );
                    }
                }
            }
        } else if node.children.len() < 2 {
            push(
                ViolationKind::TooFewChildren,
                format!("node `{}`", node.id),
                "internal node needs at least two children".into(),
            );
        }
        stack.extend(node.children.iter().rev());
    }

    let leaves: HashMap<&str, &MorphNode> = model.root.leaves().into_iter().map(|l| (l.id.as_str(), l)).collect();
    let mut pairs = HashSet::new();
    for (mi, m) in model.compat.iter().enumerate() {
        let loc = format!("compat[{mi}] `{}`-`{}`", m.part_a, m.part_b);
        if m.part_a == m.part_b {
            push(ViolationKind::SamePart, loc.clone(), "matrix relates a part to itself".into());
            continue;
        }
        let key = if m.part_a < m.part_b { (&m.part_a, &m.part_b) } else { (&m.part_b, &m.part_a) };
        if !pairs.insert(key) {
            push(ViolationKind::DuplicatePair, loc.clone(), "pair already has a matrix".into());
        }
        let (Some(a), Some(b)) = (leaves.get(m.part_a.as_str()), leaves.get(m.part_b.as_str())) else {
            push(ViolationKind::UnknownPart, loc.clone(), "matrix references a missing leaf".into());
            continue;
        };
        let shape_ok = m.values.len() == a.alternatives.len()
            && m.values.iter().all(|row| row.len() == b.alternatives.len());
        if !shape_ok {
            push(
                ViolationKind::MatrixShape,
                loc.clone(),
                format!("expected {}x{} entries", a.alternatives.len(), b.alternatives.len()),
            );
        }
        for (i, row) in m.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > s.compat_max {
                    let x = a.alternatives.get(i).map_or("?", |d| d.id.as_str());
                    let y = b.alternatives.get(j).map_or("?", |d| d.id.as_str());
                    push(
                        ViolationKind::CompatOutOfRange,
                        format!("{loc} ({x},{y})"),
                        format!("value {v} outside [0..{}]", s.compat_max),
                    );
                }
            }
        }
    }
    out
}

/// Flip each column by the sign of its criterion weight so larger values are
/// uniformly better.
pub fn orient_estimates(estimates: &[Vec<i32>], criteria: &[CriterionSpec]) -> Result<Vec<Vec<i64>>> {
    estimates
        .iter()
        .map(|row| {
            if row.len() != criteria.len() {
                return Err(Error::DimensionMismatch { expected: criteria.len(), actual: row.len() });
            }
            Ok(row.iter().zip(criteria).map(|(&z, c)| i64::from(z) * i64::from(c.weight.signum())).collect())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LeafInfo {
    pub id: String,
    pub alternatives: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct NodeInfo {
    pub id: String,
    pub children: Vec<String>,
    /// Contiguous range of leaf positions covered by the subtree.
    pub leaves: Range<usize>,
}

/// Dense, position-based view of a validated model.
#[derive(Debug, Clone)]
pub struct ModelIndex {
    pub leaves: Vec<LeafInfo>,
    leaf_pos: HashMap<String, usize>,
    nodes: HashMap<String, NodeInfo>,
    pub compat: CompatTable,
    pub compat_max: u32,
    pub layers: u32,
}

impl ModelIndex {
    fn build(model: &MorphModel) -> Self {
        let mut leaves = Vec::new();
        let mut nodes = HashMap::new();
        fn walk(n: &MorphNode, leaves: &mut Vec<LeafInfo>, nodes: &mut HashMap<String, NodeInfo>) {
            let start = leaves.len();
            if n.is_leaf() {
                leaves.push(LeafInfo {
                    id: n.id.clone(),
                    alternatives: n.alternatives.iter().map(|a| a.id.clone()).collect(),
                });
            } else {
                for c in &n.children {
                    walk(c, leaves, nodes);
                }
            }
            nodes.insert(
                n.id.clone(),
                NodeInfo {
                    id: n.id.clone(),
                    children: n.children.iter().map(|c| c.id.clone()).collect(),
                    leaves: start..leaves.len(),
                },
            );
        }
        walk(&model.root, &mut leaves, &mut nodes);
        let leaf_pos: HashMap<_, _> = leaves.iter().enumerate().map(|(i, l)| (l.id.clone(), i)).collect();
        let mut compat = CompatTable::new(leaves.iter().map(|l| l.alternatives.len()).collect());
        for m in &model.compat {
            let (a, b) = (leaf_pos[&m.part_a], leaf_pos[&m.part_b]);
            compat.insert(a, b, &m.values);
        }
        Self { leaves, leaf_pos, nodes, compat, compat_max: model.scales.compat_max, layers: model.scales.layers }
    }

    pub fn leaf_position(&self, id: &str) -> Result<usize> {
        self.leaf_pos.get(id).copied().ok_or_else(|| match self.nodes.get(id) {
            Some(_) => Error::NotALeaf(id.to_string()),
            None => Error::UnknownNode(id.to_string()),
        })
    }

    pub fn alternative_position(&self, leaf: usize, id: &str) -> Result<usize> {
        self.leaves[leaf].alternatives.iter().position(|a| a == id).ok_or_else(|| Error::UnknownAlternative {
            part: self.leaves[leaf].id.clone(),
            alternative: id.to_string(),
        })
    }

    pub fn node(&self, id: &str) -> Result<&NodeInfo> {
        self.nodes.get(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Lowest node whose subtree contains both leaves.
    pub fn common_ancestor(&self, root: &MorphNode, a: usize, b: usize) -> String {
        let mut cur = root;
        'descend: loop {
            for c in &cur.children {
                let r = &self.nodes[&c.id].leaves;
                if r.contains(&a) && r.contains(&b) {
                    cur = c;
                    continue 'descend;
                }
            }
            return cur.id.clone();
        }
    }

    /// Per-leaf priority vectors in alternative order.
    pub fn priority_table(&self, priorities: &Priorities) -> Result<Vec<Vec<u32>>> {
        self.leaves
            .iter()
            .map(|leaf| {
                let p = priorities.get(&leaf.id).ok_or_else(|| Error::MissingPriorities(leaf.id.clone()))?;
                leaf.alternatives
                    .iter()
                    .map(|a| {
                        let r = *p.get(a).ok_or_else(|| Error::MissingPriorities(format!("{}/{}", leaf.id, a)))?;
                        if r == 0 || r > self.layers {
                            return Err(Error::PriorityOutOfRange {
                                alternative: format!("{}/{}", leaf.id, a),
                                value: r,
                                layers: self.layers,
                            });
                        }
                        Ok(r)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Symmetric compatibility lookup by leaf and alternative position. Pairs
/// without a matrix report `None` (treated as fully compatible by callers).
#[derive(Debug, Clone)]
pub struct CompatTable {
    sizes: Vec<usize>,
    pairs: HashMap<(usize, usize), Vec<u32>>,
}

impl CompatTable {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self { sizes, pairs: HashMap::new() }
    }

    /// Store `values[i][j]` for alternative i of leaf `a`, j of leaf `b`.
    pub fn insert(&mut self, a: usize, b: usize, values: &[Vec<u32>]) {
        let (na, nb) = (self.sizes[a], self.sizes[b]);
        let mut flat = vec![0; na * nb];
        for (i, row) in values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if a < b {
                    flat[i * nb + j] = v;
                } else {
                    flat[j * na + i] = v;
                }
            }
        }
        self.pairs.insert((a.min(b), a.max(b)), flat);
    }

    pub fn has_pair(&self, a: usize, b: usize) -> bool {
        self.pairs.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn get(&self, a: usize, x: usize, b: usize, y: usize) -> Option<u32> {
        let (lo, hi, xi, yi) = if a < b { (a, b, x, y) } else { (b, a, y, x) };
        self.pairs.get(&(lo, hi)).map(|flat| flat[xi * self.sizes[hi] + yi])
    }

    pub fn set(&mut self, a: usize, x: usize, b: usize, y: usize, value: u32) -> bool {
        let (lo, hi, xi, yi) = if a < b { (a, b, x, y) } else { (b, a, y, x) };
        let width = self.sizes[hi];
        match self.pairs.get_mut(&(lo, hi)) {
            Some(flat) => {
                flat[xi * width + yi] = value;
                true
            }
            None => false,
        }
    }

    /// Leaf pairs that carry an explicit matrix, ordered.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.pairs.keys().copied().collect();
        v.sort_unstable();
        v
    }
}
