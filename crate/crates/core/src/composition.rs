//! Morphological clique composition.
//!
//! Every internal node combines one member from each child. A combination is
//! feasible when no pair of chosen alternatives has compatibility 0; its
//! quality is `N(S) = (w; n)` where `w` is the smallest pairwise compatibility
//! and `n[r]` counts chosen alternatives at priority `r + 1`. Each node keeps
//! the combinations no other combination strictly dominates, and passes them
//! up to its parent unchanged (no re-ranking between levels).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{CompatTable, ModelIndex, MorphModel, MorphNode, Priorities};

/// Lattice-valued quality of a composite decision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QualityVector {
    /// Minimum pairwise compatibility.
    pub w: u32,
    /// Count of chosen alternatives per priority layer.
    pub n: Vec<u32>,
}

impl QualityVector {
    pub fn new(w: u32, n: Vec<u32>) -> Self {
        Self { w, n }
    }

    /// Number of composed parts.
    pub fn parts(&self) -> u32 {
        self.n.iter().sum()
    }

    fn cumulative(&self) -> impl Iterator<Item = u32> + '_ {
        self.n.iter().scan(0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
    }
}

impl fmt::Display for QualityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.w)?;
        for (i, x) in self.n.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for QualityVector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| format!("quality vector `{s}` must look like (w;n1,...,nk)"))?;
        let (w, n) = inner.split_once(';').ok_or_else(|| format!("missing `;` in `{s}`"))?;
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
        Ok(Self { w: parse(w)?, n: n.split(',').map(parse).collect::<std::result::Result<_, _>>()? })
    }
}

impl Serialize for QualityVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QualityVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    StrictlyDominates,
    Equal,
    Dominated,
    Incomparable,
}

/// Compare two quality vectors: `w` numerically, `n` by cumulative layer
/// counts (more parts in the top `r` layers is better, for every `r`).
pub fn dominates_quality(a: &QualityVector, b: &QualityVector) -> Result<Dominance> {
    if a.n.len() != b.n.len() {
        return Err(Error::Incommensurable(format!("layer counts {} and {}", a.n.len(), b.n.len())));
    }
    if a.parts() != b.parts() {
        return Err(Error::Incommensurable(format!("part counts {} and {}", a.parts(), b.parts())));
    }
    Ok(compare(a, b))
}

fn compare(a: &QualityVector, b: &QualityVector) -> Dominance {
    let mut ge = a.w >= b.w;
    let mut le = a.w <= b.w;
    for (x, y) in a.cumulative().zip(b.cumulative()) {
        ge &= x >= y;
        le &= x <= y;
    }
    match (ge, le) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::StrictlyDominates,
        (false, true) => Dominance::Dominated,
        (false, false) => Dominance::Incomparable,
    }
}

/// Pareto-peeling index of each vector: 1 for the nondominated ones, then 2
/// once those are removed, and so on. Used to turn composite decisions back
/// into ordinal priorities for a further composition level.
pub fn quality_layers(qualities: &[QualityVector]) -> Result<Vec<u32>> {
    for q in qualities.iter().skip(1) {
        dominates_quality(&qualities[0], q)?;
    }
    let mut layer = vec![0u32; qualities.len()];
    let mut depth = 0;
    while layer.contains(&0) {
        depth += 1;
        let remaining: Vec<usize> = (0..qualities.len()).filter(|&i| layer[i] == 0).collect();
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| compare(&qualities[j], &qualities[i]) == Dominance::StrictlyDominates)
            })
            .collect();
        for i in front {
            layer[i] = depth;
        }
    }
    Ok(layer)
}

/// Alternative chosen for each part, in part order.
pub type Choice = IndexMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bottleneck {
    pub part_a: String,
    pub alternative_a: String,
    pub part_b: String,
    pub alternative_b: String,
    pub value: u32,
}

impl fmt::Display for Bottleneck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})={}", self.alternative_a, self.alternative_b, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeDecision {
    pub choice: Choice,
    pub quality: QualityVector,
    pub bottlenecks: Vec<Bottleneck>,
}

impl CompositeDecision {
    /// Chosen alternatives joined with `*`, e.g. `W1*D2*O5`.
    pub fn label(&self) -> String {
        self.choice.values().cloned().collect::<Vec<_>>().join("*")
    }
}

/// Nondominated decisions of one node, ordered lexicographically by part
/// order then alternative position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoSet {
    pub node: String,
    pub decisions: Vec<CompositeDecision>,
}

impl ParetoSet {
    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn find(&self, alternatives: &[&str]) -> Option<&CompositeDecision> {
        self.decisions.iter().find(|d| d.choice.values().map(String::as_str).eq(alternatives.iter().copied()))
    }
}

/// Diagnostics for a node where every combination contains a zero pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasibleNode {
    pub node: String,
    /// Every zero-valued compatibility entry among the node's parts.
    pub zero_pairs: Vec<Bottleneck>,
}

/// Position-based member of a node's candidate set.
#[derive(Debug, Clone)]
struct Member {
    picks: Vec<(usize, usize)>,
    quality: QualityVector,
}

/// Everything composition needs: the index, a (possibly overridden)
/// compatibility table and per-leaf priority vectors.
pub(crate) struct Composer<'a> {
    root: &'a MorphNode,
    index: &'a ModelIndex,
    compat: &'a CompatTable,
    prio: &'a [Vec<u32>],
}

impl<'a> Composer<'a> {
    pub(crate) fn new(root: &'a MorphNode, index: &'a ModelIndex, compat: &'a CompatTable, prio: &'a [Vec<u32>]) -> Self {
        Self { root, index, compat, prio }
    }

    fn k(&self) -> usize {
        self.index.layers as usize
    }

    fn l(&self) -> u32 {
        self.index.compat_max
    }

    fn leaf_members(&self, leaf: usize) -> Vec<Member> {
        (0..self.index.leaves[leaf].alternatives.len())
            .map(|alt| {
                let mut n = vec![0; self.k()];
                n[self.prio[leaf][alt] as usize - 1] += 1;
                Member { picks: vec![(leaf, alt)], quality: QualityVector::new(self.l(), n) }
            })
            .collect()
    }

    /// Compose the subtree rooted at `node`, recording each node's members.
    fn compose(&self, node: &MorphNode, out: &mut Vec<(String, Vec<Member>)>) -> Result<Vec<Member>> {
        if node.is_leaf() {
            let leaf = self.index.leaf_position(&node.id)?;
            let members = self.leaf_members(leaf);
            out.push((node.id.clone(), members.clone()));
            return Ok(members);
        }
        let children = node
            .children
            .iter()
            .map(|c| self.compose(c, out))
            .collect::<Result<Vec<_>>>()?;
        let members = self.combine(&children);
        if members.is_empty() {
            return Err(Error::Infeasible(Box::new(self.diagnose(&node.id)?)));
        }
        out.push((node.id.clone(), members.clone()));
        Ok(members)
    }

    /// Feasible cross product of child members, Pareto-filtered.
    fn combine(&self, children: &[Vec<Member>]) -> Vec<Member> {
        // Explicit leaf pairs between every pair of children.
        let spans: Vec<Vec<usize>> = children
            .iter()
            .map(|ms| ms.first().map(|m| m.picks.iter().map(|p| p.0).collect()).unwrap_or_default())
            .collect();
        let mut cross = vec![vec![Vec::new(); children.len()]; children.len()];
        for a in 0..children.len() {
            for b in 0..a {
                for (ia, &la) in spans[a].iter().enumerate() {
                    for (ib, &lb) in spans[b].iter().enumerate() {
                        if self.compat.has_pair(la, lb) {
                            cross[a][b].push((ia, ib));
                        }
                    }
                }
            }
        }

        let mut found = Vec::new();
        let mut stack: Vec<&Member> = Vec::with_capacity(children.len());
        self.extend(children, &cross, &mut stack, self.l(), &mut found);
        pareto_filter(found)
    }

    fn extend<'m>(
        &self,
        children: &'m [Vec<Member>],
        cross: &[Vec<Vec<(usize, usize)>>],
        stack: &mut Vec<&'m Member>,
        w: u32,
        found: &mut Vec<Member>,
    ) {
        let depth = stack.len();
        if depth == children.len() {
            let mut n = vec![0; self.k()];
            let mut picks = Vec::new();
            for m in stack.iter() {
                for (x, y) in n.iter_mut().zip(&m.quality.n) {
                    *x += y;
                }
                picks.extend_from_slice(&m.picks);
            }
            picks.sort_unstable();
            found.push(Member { picks, quality: QualityVector::new(w, n) });
            return;
        }
        'member: for m in &children[depth] {
            let mut w = w.min(m.quality.w);
            for (prev, pm) in stack.iter().enumerate() {
                for &(ia, ib) in &cross[depth][prev] {
                    let (la, xa) = m.picks[ia];
                    let (lb, xb) = pm.picks[ib];
                    let v = self.compat.get(la, xa, lb, xb).expect("pair listed as explicit");
                    if v == 0 {
                        continue 'member;
                    }
                    w = w.min(v);
                }
            }
            stack.push(m);
            self.extend(children, cross, stack, w, found);
            stack.pop();
        }
    }

    fn diagnose(&self, node: &str) -> Result<InfeasibleNode> {
        let range = self.index.node(node)?.leaves.clone();
        let mut zero_pairs = Vec::new();
        for (a, b) in self.compat.pairs() {
            if !(range.contains(&a) && range.contains(&b)) {
                continue;
            }
            for x in 0..self.index.leaves[a].alternatives.len() {
                for y in 0..self.index.leaves[b].alternatives.len() {
                    if self.compat.get(a, x, b, y) == Some(0) {
                        zero_pairs.push(self.bottleneck(a, x, b, y, 0));
                    }
                }
            }
        }
        Ok(InfeasibleNode { node: node.to_string(), zero_pairs })
    }

    fn bottleneck(&self, a: usize, x: usize, b: usize, y: usize, value: u32) -> Bottleneck {
        let (la, lb) = (&self.index.leaves[a], &self.index.leaves[b]);
        Bottleneck {
            part_a: la.id.clone(),
            alternative_a: la.alternatives[x].clone(),
            part_b: lb.id.clone(),
            alternative_b: lb.alternatives[y].clone(),
            value,
        }
    }

    /// Explicitly estimated pairs of the picks whose value equals `w`.
    fn bottlenecks(&self, picks: &[(usize, usize)], w: u32) -> Vec<Bottleneck> {
        let mut out = Vec::new();
        for (i, &(a, x)) in picks.iter().enumerate() {
            for &(b, y) in &picks[i + 1..] {
                if self.compat.get(a, x, b, y) == Some(w) {
                    out.push(self.bottleneck(a, x, b, y, w));
                }
            }
        }
        out
    }

    fn decision(&self, m: &Member) -> CompositeDecision {
        let choice = m
            .picks
            .iter()
            .map(|&(l, a)| (self.index.leaves[l].id.clone(), self.index.leaves[l].alternatives[a].clone()))
            .collect();
        CompositeDecision { choice, quality: m.quality.clone(), bottlenecks: self.bottlenecks(&m.picks, m.quality.w) }
    }

    fn pareto_set(&self, node: &str, members: &[Member]) -> ParetoSet {
        ParetoSet { node: node.to_string(), decisions: members.iter().map(|m| self.decision(m)).collect() }
    }

    pub(crate) fn compose_node(&self, node: &str) -> Result<ParetoSet> {
        let n = self.root.find(node).ok_or_else(|| Error::UnknownNode(node.to_string()))?;
        let members = self.compose(n, &mut Vec::new())?;
        Ok(self.pareto_set(node, &members))
    }

    pub(crate) fn compose_all(&self) -> Result<IndexMap<String, ParetoSet>> {
        let mut out = Vec::new();
        self.compose(self.root, &mut out)?;
        Ok(out.into_iter().map(|(id, ms)| {
            let set = self.pareto_set(&id, &ms);
            (id, set)
        }).collect())
    }
}

/// Keep members whose quality no other member strictly dominates; ties are
/// all kept. Output is sorted by picks.
fn pareto_filter(mut found: Vec<Member>) -> Vec<Member> {
    let distinct: BTreeSet<&QualityVector> = found.iter().map(|m| &m.quality).collect();
    let front: BTreeSet<QualityVector> = distinct
        .iter()
        .filter(|q| !distinct.iter().any(|p| compare(p, q) == Dominance::StrictlyDominates))
        .map(|q| (*q).clone())
        .collect();
    found.retain(|m| front.contains(&m.quality));
    found.sort_by(|a, b| a.picks.cmp(&b.picks));
    found
}

/// Quality of an explicit choice covering some set of parts.
pub fn quality_vector(model: &MorphModel, choice: &Choice, priorities: &Priorities) -> Result<QualityVector> {
    let index = model.index()?;
    let k = model.scales.layers as usize;
    let picks = resolve_choice(&index, choice)?;
    let mut n = vec![0; k];
    let mut w = model.scales.compat_max;
    let mut zeros = Vec::new();
    for &(leaf, alt) in &picks {
        let part = &index.leaves[leaf];
        let r = priorities
            .get(&part.id)
            .and_then(|p| p.get(&part.alternatives[alt]))
            .copied()
            .ok_or_else(|| Error::MissingPriorities(format!("{}/{}", part.id, part.alternatives[alt])))?;
        if r == 0 || r as usize > k {
            return Err(Error::PriorityOutOfRange { alternative: part.alternatives[alt].clone(), value: r, layers: k as u32 });
        }
        n[r as usize - 1] += 1;
    }
    for (i, &(a, x)) in picks.iter().enumerate() {
        for &(b, y) in &picks[i + 1..] {
            if let Some(v) = index.compat.get(a, x, b, y) {
                if v == 0 {
                    zeros.push(Bottleneck {
                        part_a: index.leaves[a].id.clone(),
                        alternative_a: index.leaves[a].alternatives[x].clone(),
                        part_b: index.leaves[b].id.clone(),
                        alternative_b: index.leaves[b].alternatives[y].clone(),
                        value: 0,
                    });
                }
                w = w.min(v);
            }
        }
    }
    if !zeros.is_empty() {
        let node = choice.keys().cloned().collect::<Vec<_>>().join("*");
        return Err(Error::Infeasible(Box::new(InfeasibleNode { node, zero_pairs: zeros })));
    }
    Ok(QualityVector::new(w, n))
}

fn resolve_choice(index: &ModelIndex, choice: &Choice) -> Result<Vec<(usize, usize)>> {
    let mut picks = choice
        .iter()
        .map(|(part, alt)| {
            let leaf = index.leaf_position(part)?;
            Ok((leaf, index.alternative_position(leaf, alt)?))
        })
        .collect::<Result<Vec<_>>>()?;
    picks.sort_unstable();
    Ok(picks)
}

/// Pairs of a decision at its minimum compatibility, in part order. Only
/// explicitly estimated pairs are reported.
pub fn find_bottlenecks(model: &MorphModel, decision: &CompositeDecision) -> Result<Vec<Bottleneck>> {
    let index = model.index()?;
    let picks = resolve_choice(&index, &decision.choice)?;
    if picks.len() < 2 {
        return Ok(Vec::new());
    }
    let compat = &index.compat;
    let w = picks
        .iter()
        .enumerate()
        .flat_map(|(i, &(a, x))| picks[i + 1..].iter().filter_map(move |&(b, y)| compat.get(a, x, b, y)))
        .min()
        .unwrap_or(model.scales.compat_max);
    let prio: Vec<Vec<u32>> = Vec::new();
    Ok(Composer::new(&model.root, &index, &index.compat, &prio).bottlenecks(&picks, w))
}

/// Pareto set of one node of the model.
pub fn compose_part(model: &MorphModel, node: &str, priorities: &Priorities) -> Result<ParetoSet> {
    let index = model.index()?;
    let prio = index.priority_table(priorities)?;
    Composer::new(&model.root, &index, &index.compat, &prio).compose_node(node)
}

/// Pareto sets of every node, bottom-up (children before parents).
pub fn compose_tree(model: &MorphModel, priorities: &Priorities) -> Result<IndexMap<String, ParetoSet>> {
    let index = model.index()?;
    let prio = index.priority_table(priorities)?;
    Composer::new(&model.root, &index, &index.compat, &prio).compose_all()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatOverride {
    pub part_a: String,
    pub alternative_a: String,
    pub part_b: String,
    pub alternative_b: String,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorityOverride {
    pub part: String,
    pub alternative: String,
    pub priority: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Overrides {
    pub compat: Vec<CompatOverride>,
    pub priorities: Vec<PriorityOverride>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityChange {
    pub choice: Choice,
    pub before: QualityVector,
    pub after: QualityVector,
}

/// Effect of hypothetical estimate changes on one node's Pareto set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfDelta {
    pub node: String,
    pub before: ParetoSet,
    pub after: ParetoSet,
    /// Choices present only after the override.
    pub entered: Vec<CompositeDecision>,
    /// Choices present only before the override.
    pub left: Vec<CompositeDecision>,
    /// Choices in both sets whose quality moved.
    pub changed: Vec<QualityChange>,
}

impl WhatIfDelta {
    pub fn is_empty(&self) -> bool {
        self.entered.is_empty() && self.left.is_empty() && self.changed.is_empty()
    }
}

/// Recompose `node` (default: the lowest node spanning every overridden
/// pair, else the root) with overrides applied to a scratch copy of the
/// estimates. The model is not touched.
pub fn what_if(model: &MorphModel, priorities: &Priorities, node: Option<&str>, overrides: &Overrides) -> Result<WhatIfDelta> {
    let index = model.index()?;
    let l = model.scales.compat_max;
    let k = model.scales.layers;

    let mut compat = index.compat.clone();
    let mut lca: Option<(usize, usize)> = None;
    for o in &overrides.compat {
        if o.value > l {
            return Err(Error::OutOfRange { value: o.value.into(), min: 0, max: l.into() });
        }
        let a = index.leaf_position(&o.part_a)?;
        let b = index.leaf_position(&o.part_b)?;
        let x = index.alternative_position(a, &o.alternative_a)?;
        let y = index.alternative_position(b, &o.alternative_b)?;
        if a == b || !compat.set(a, x, b, y, o.value) {
            return Err(Error::UnknownPair(o.part_a.clone(), o.part_b.clone()));
        }
        lca = Some(match lca {
            None => (a.min(b), a.max(b)),
            Some((lo, hi)) => (lo.min(a.min(b)), hi.max(a.max(b))),
        });
    }
    let mut changed_prio = priorities.clone();
    for o in &overrides.priorities {
        if o.priority == 0 || o.priority > k {
            return Err(Error::OutOfRange { value: o.priority.into(), min: 1, max: k.into() });
        }
        let leaf = index.leaf_position(&o.part)?;
        index.alternative_position(leaf, &o.alternative)?;
        let entry = changed_prio.entry(o.part.clone()).or_default();
        entry.insert(o.alternative.clone(), o.priority);
        lca = Some(match lca {
            None => (leaf, leaf),
            Some((lo, hi)) => (lo.min(leaf), hi.max(leaf)),
        });
    }

    let node = match (node, lca) {
        (Some(n), _) => {
            index.node(n)?;
            n.to_string()
        }
        (None, Some((lo, hi))) => index.common_ancestor(&model.root, lo, hi),
        (None, None) => model.root.id.clone(),
    };

    let prio_before = index.priority_table(priorities)?;
    let prio_after = index.priority_table(&changed_prio)?;
    let before = Composer::new(&model.root, &index, &index.compat, &prio_before).compose_node(&node)?;
    let after = match Composer::new(&model.root, &index, &compat, &prio_after).compose_node(&node) {
        Ok(set) => set,
        Err(Error::Infeasible(_)) => ParetoSet { node: node.clone(), decisions: Vec::new() },
        Err(e) => return Err(e),
    };

    let find = |set: &ParetoSet, c: &Choice| set.decisions.iter().find(|d| &d.choice == c).cloned();
    let entered = after.decisions.iter().filter(|d| find(&before, &d.choice).is_none()).cloned().collect();
    let left = before.decisions.iter().filter(|d| find(&after, &d.choice).is_none()).cloned().collect();
    let changed = before
        .decisions
        .iter()
        .filter_map(|d| {
            let a = find(&after, &d.choice)?;
            (a.quality != d.quality).then(|| QualityChange { choice: d.choice.clone(), before: d.quality.clone(), after: a.quality })
        })
        .collect();
    Ok(WhatIfDelta { node, before, after, entered, left, changed })
}

/// Single-pair improvement at the pair's lowest common node.
pub fn what_if_improve(model: &MorphModel, priorities: &Priorities, pair: CompatOverride) -> Result<WhatIfDelta> {
    what_if(model, priorities, None, &Overrides { compat: vec![pair], priorities: Vec::new() })
}
