//! Random instance generators and brute-force oracles shared by the
//! integration suites. Oracles deliberately avoid the library's own
//! dominance and enumeration code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use morphsynth::{
    CompatibilityMatrix, CriterionSpec, DesignAlternative, KnapsackItem, MorphModel, MorphNode, Priorities, Rational,
};
use rand::Rng;

pub const LAYERS: usize = 3;
pub const L: u32 = 3;

/// A flat system: one root over `sizes.len()` leaves.
#[derive(Debug, Clone)]
pub struct FlatInstance {
    pub model: MorphModel,
    pub priorities: Priorities,
}

pub fn leaf_id(i: usize) -> String {
    format!("P{i}")
}

pub fn alt_id(i: usize, j: usize) -> String {
    format!("P{i}a{j}")
}

/// Random flat instance: every part pair gets a matrix with probability
/// `matrix_prob`; each entry is nonzero with probability `density`.
pub fn random_flat<R: Rng>(rng: &mut R, parts: usize, max_alts: usize, density: f64, matrix_prob: f64) -> FlatInstance {
    let sizes: Vec<usize> = (0..parts).map(|_| rng.gen_range(1..=max_alts)).collect();
    let leaves = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| MorphNode::leaf(leaf_id(i), (0..n).map(|j| DesignAlternative::new(alt_id(i, j), vec![1])).collect()))
        .collect();
    let mut compat = Vec::new();
    for a in 0..parts {
        for b in a + 1..parts {
            if rng.gen_bool(matrix_prob) {
                let values = (0..sizes[a])
                    .map(|_| (0..sizes[b]).map(|_| if rng.gen_bool(density) { rng.gen_range(1..=L) } else { 0 }).collect())
                    .collect();
                compat.push(CompatibilityMatrix { part_a: leaf_id(a), part_b: leaf_id(b), values });
            }
        }
    }
    let priorities = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| (leaf_id(i), (0..n).map(|j| (alt_id(i, j), rng.gen_range(1..=LAYERS as u32))).collect()))
        .collect();
    let model = MorphModel::new(vec![CriterionSpec::new("c", 1)], MorphNode::internal("S", leaves), compat);
    FlatInstance { model, priorities }
}

/// (choice labels, w, n) of a combination.
pub type Outcome = (Vec<String>, u32, Vec<u32>);

fn lookup(model: &MorphModel, a: usize, x: usize, b: usize, y: usize) -> Option<u32> {
    let (pa, pb) = (leaf_id(a), leaf_id(b));
    model.compat.iter().find_map(|m| {
        if m.part_a == pa && m.part_b == pb {
            Some(m.values[x][y])
        } else if m.part_a == pb && m.part_b == pa {
            Some(m.values[y][x])
        } else {
            None
        }
    })
}

/// Cumulative-count dominance written out directly.
pub fn oracle_strictly_dominates(a: (u32, &[u32]), b: (u32, &[u32])) -> bool {
    let mut ge = a.0 >= b.0;
    let mut gt = a.0 > b.0;
    let (mut sa, mut sb) = (0, 0);
    for (x, y) in a.1.iter().zip(b.1) {
        sa += x;
        sb += y;
        ge &= sa >= sb;
        gt |= sa > sb;
    }
    ge && gt
}

/// Every feasible combination of a flat instance, then the Pareto filter.
pub fn brute_force_pareto(inst: &FlatInstance) -> BTreeSet<Outcome> {
    let sizes: Vec<usize> = inst.model.root.children.iter().map(|c| c.alternatives.len()).collect();
    let mut all = Vec::new();
    let mut idx = vec![0usize; sizes.len()];
    loop {
        let mut w = L;
        let mut feasible = true;
        for a in 0..sizes.len() {
            for b in a + 1..sizes.len() {
                if let Some(v) = lookup(&inst.model, a, idx[a], b, idx[b]) {
                    feasible &= v > 0;
                    w = w.min(v);
                }
            }
        }
        if feasible {
            let mut n = vec![0; LAYERS];
            for (i, &j) in idx.iter().enumerate() {
                n[inst.priorities[&leaf_id(i)][&alt_id(i, j)] as usize - 1] += 1;
            }
            all.push(((0..sizes.len()).map(|i| alt_id(i, idx[i])).collect::<Vec<_>>(), w, n));
        }
        // odometer
        let mut p = sizes.len();
        loop {
            if p == 0 {
                return all
                    .iter()
                    .filter(|(_, w, n)| !all.iter().any(|(_, w2, n2)| oracle_strictly_dominates((*w2, n2), (*w, n))))
                    .cloned()
                    .collect();
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < sizes[p] {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Random multiple-choice knapsack: `groups` groups of 1..=`max_items`.
pub fn random_items<R: Rng>(rng: &mut R, groups: usize, max_items: usize, profit_len: usize) -> Vec<KnapsackItem> {
    let mut items = Vec::new();
    for g in 0..groups {
        for j in 0..rng.gen_range(1..=max_items) {
            let mut it = KnapsackItem::new(format!("G{g}"), format!("G{g}i{j}"), rng.gen_range(1..=9), rng.gen_range(1..=4));
            if profit_len > 0 {
                it = it.with_profit((0..profit_len).map(|_| rng.gen_range(0..=9)).collect());
            }
            items.push(it);
        }
    }
    items
}

/// Group index vectors in first-appearance order.
pub fn groups_of(items: &[KnapsackItem]) -> Vec<Vec<usize>> {
    let mut names: Vec<&str> = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, it) in items.iter().enumerate() {
        match names.iter().position(|n| *n == it.group) {
            Some(g) => out[g].push(i),
            None => {
                names.push(&it.group);
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Every one-per-group selection as item indices.
pub fn all_selections(items: &[KnapsackItem]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for g in groups_of(items) {
        out = out.into_iter().flat_map(|s| g.iter().map(move |&i| [s.clone(), vec![i]].concat())).collect();
    }
    out
}

pub fn oracle_lambda(items: &[KnapsackItem]) -> Vec<Rational> {
    let r_hat = items.iter().map(|i| i.utility_priority).max().unwrap() as i64;
    items.iter().map(|i| Rational::new(r_hat - i.utility_priority as i64, i.cost as i64)).collect()
}

/// Maximum total lambda over budget-feasible selections.
pub fn brute_force_best(items: &[KnapsackItem], lambdas: &[Rational], budget: u64) -> Option<Rational> {
    all_selections(items)
        .into_iter()
        .filter(|s| s.iter().map(|&i| items[i].cost).sum::<u64>() <= budget)
        .map(|s| s.iter().map(|&i| lambdas[i]).sum())
        .max()
}

/// Profit vectors of the nondominated feasible selections, with the
/// selections as id lists.
pub fn brute_force_pareto_pack(items: &[KnapsackItem], budget: u64) -> BTreeSet<(Vec<String>, Vec<i64>)> {
    let feasible: Vec<(Vec<String>, Vec<i64>)> = all_selections(items)
        .into_iter()
        .filter(|s| s.iter().map(|&i| items[i].cost).sum::<u64>() <= budget)
        .map(|s| {
            let len = items[0].profit.as_ref().unwrap().len();
            let mut p = vec![0; len];
            for &i in &s {
                for (a, b) in p.iter_mut().zip(items[i].profit.as_ref().unwrap()) {
                    *a += b;
                }
            }
            (s.iter().map(|&i| items[i].id.clone()).collect(), p)
        })
        .collect();
    feasible
        .iter()
        .filter(|(_, p)| !feasible.iter().any(|(_, q)| q.iter().zip(p).all(|(a, b)| a >= b) && q != p))
        .cloned()
        .collect()
}
