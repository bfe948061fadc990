//! Multiple-choice knapsack: pick exactly one item per group under a total
//! cost budget.
//!
//! Items are ordered by relative utility `lambda = (r_hat - r) / cost`, where
//! `r` is the item's utility priority (1 best) and `r_hat` the worst priority
//! present. Three solvers share the item model: a feasibility-aware greedy
//! scan of that ordering, an exact lambda-maximizing dynamic program, and a
//! Pareto dynamic program over vector profits.

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MorphModel, Priorities};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub group: String,
    pub id: String,
    pub cost: u64,
    pub utility_priority: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profit: Option<Vec<i64>>,
}

impl KnapsackItem {
    pub fn new(group: impl Into<String>, id: impl Into<String>, cost: u64, utility_priority: u32) -> Self {
        Self { group: group.into(), id: id.into(), cost, utility_priority, profit: None }
    }

    pub fn with_profit(mut self, profit: Vec<i64>) -> Self {
        self.profit = Some(profit);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub group: String,
    pub id: String,
    pub cost: u64,
    pub utility_priority: u32,
    pub lambda: Rational,
    /// 1-based position in the lambda ordering.
    pub rank: usize,
}

/// Lambda ordering, entries in input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackOrdering {
    pub r_hat: u32,
    pub entries: Vec<OrderEntry>,
}

impl KnapsackOrdering {
    pub fn lambdas(&self) -> Vec<Rational> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Input indices in rank order.
    pub fn scan_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.entries.len()).collect();
        idx.sort_by_key(|&i| self.entries[i].rank);
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    /// Chosen item per group, in group order.
    pub picks: IndexMap<String, String>,
    pub total_cost: u64,
    pub total_lambda: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_profit: Option<Vec<i64>>,
}

impl Selection {
    pub fn label(&self) -> String {
        self.picks.values().cloned().collect::<Vec<_>>().join(" ")
    }
}

/// Groups in first-appearance order, each with its item indices.
fn groups(items: &[KnapsackItem]) -> Vec<Vec<usize>> {
    let mut order: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (i, it) in items.iter().enumerate() {
        order.entry(it.group.as_str()).or_default().push(i);
    }
    order.into_values().collect()
}

fn check_costs(items: &[KnapsackItem]) -> Result<()> {
    if items.is_empty() {
        return Err(Error::EmptyInput("no knapsack items"));
    }
    match items.iter().find(|it| it.cost == 0) {
        Some(it) => Err(Error::NonpositiveCost(it.id.clone())),
        None => Ok(()),
    }
}

fn min_total(items: &[KnapsackItem], groups: &[Vec<usize>]) -> u64 {
    groups.iter().map(|g| g.iter().map(|&i| items[i].cost).min().unwrap_or(0)).sum()
}

fn check_budget(items: &[KnapsackItem], groups: &[Vec<usize>], budget: u64) -> Result<()> {
    let minimum = min_total(items, groups);
    if minimum > budget {
        return Err(Error::InfeasibleBudget { budget, minimum });
    }
    Ok(())
}

/// Relative utility of every item and its position when sorted by
/// descending utility (ties keep input order).
pub fn lambda_order(items: &[KnapsackItem]) -> Result<KnapsackOrdering> {
    check_costs(items)?;
    if items.iter().any(|it| it.utility_priority == 0) {
        return Err(Error::OutOfRange { value: 0, min: 1, max: i64::from(u32::MAX) });
    }
    let r_hat = items.iter().map(|it| it.utility_priority).max().unwrap_or(1);
    let lambdas: Vec<Rational> = items
        .iter()
        .map(|it| Rational::new(i64::from(r_hat - it.utility_priority), it.cost as i64))
        .collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| lambdas[b].cmp(&lambdas[a]));
    let mut rank = vec![0; items.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }
    let entries = items
        .iter()
        .zip(lambdas)
        .zip(rank)
        .map(|((it, lambda), rank)| OrderEntry {
            group: it.group.clone(),
            id: it.id.clone(),
            cost: it.cost,
            utility_priority: it.utility_priority,
            lambda,
            rank,
        })
        .collect();
    Ok(KnapsackOrdering { r_hat, entries })
}

fn selection(items: &[KnapsackItem], lambdas: &[Rational], chosen: &[usize]) -> Selection {
    let profit = chosen
        .iter()
        .map(|&i| items[i].profit.clone())
        .try_fold(Vec::<i64>::new(), |mut acc, p| {
            let p = p?;
            if acc.is_empty() {
                acc = vec![0; p.len()];
            }
            for (a, v) in acc.iter_mut().zip(&p) {
                *a += v;
            }
            Some(acc)
        });
    Selection {
        picks: chosen.iter().map(|&i| (items[i].group.clone(), items[i].id.clone())).collect(),
        total_cost: chosen.iter().map(|&i| items[i].cost).sum(),
        total_lambda: chosen.iter().map(|&i| lambdas.get(i).copied().unwrap_or_default()).sum(),
        total_profit: profit,
    }
}

/// Scan items in lambda order, accepting an item when its group is still
/// open and the remaining open groups can still be closed at their cheapest
/// cost within the budget.
pub fn greedy_pack(ordering: &KnapsackOrdering, items: &[KnapsackItem], budget: u64) -> Result<Selection> {
    check_costs(items)?;
    if ordering.entries.len() != items.len() {
        return Err(Error::DimensionMismatch { expected: items.len(), actual: ordering.entries.len() });
    }
    let groups = groups(items);
    check_budget(items, &groups, budget)?;
    let group_of: IndexMap<&str, usize> = items
        .iter()
        .map(|it| it.group.as_str())
        .collect::<indexmap::IndexSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(g, name)| (name, g))
        .collect();
    let cheapest: Vec<u64> = groups.iter().map(|g| g.iter().map(|&i| items[i].cost).min().unwrap_or(0)).collect();

    let mut chosen: Vec<Option<usize>> = vec![None; groups.len()];
    let mut spent = 0;
    let mut reserve: u64 = cheapest.iter().sum();
    for i in ordering.scan_order() {
        let g = group_of[items[i].group.as_str()];
        if chosen[g].is_some() {
            continue;
        }
        if spent + items[i].cost + reserve - cheapest[g] <= budget {
            chosen[g] = Some(i);
            spent += items[i].cost;
            reserve -= cheapest[g];
        }
    }
    let chosen: Vec<usize> = chosen.into_iter().map(|c| c.expect("cheapest item is always acceptable")).collect();
    Ok(selection(items, &ordering.lambdas(), &chosen))
}

/// Maximize total lambda subject to one item per group and the budget.
/// Among optimal selections the lexicographically smallest tuple of
/// within-group positions wins.
pub fn exact_pack(items: &[KnapsackItem], lambdas: &[Rational], budget: u64) -> Result<Selection> {
    check_costs(items)?;
    if lambdas.len() != items.len() {
        return Err(Error::DimensionMismatch { expected: items.len(), actual: lambdas.len() });
    }
    let groups = groups(items);
    check_budget(items, &groups, budget)?;
    let cap = budget.min(groups.iter().map(|g| g.iter().map(|&i| items[i].cost).max().unwrap_or(0)).sum()) as usize;

    // best[g][b]: optimum for groups g.. with budget b left.
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; cap + 1]; groups.len() + 1];
    best[groups.len()] = vec![Some(Rational::from_integer(0)); cap + 1];
    for g in (0..groups.len()).rev() {
        for b in 0..=cap {
            best[g][b] = groups[g]
                .iter()
                .filter(|&&i| items[i].cost as usize <= b)
                .filter_map(|&i| Some(lambdas[i] + best[g + 1][b - items[i].cost as usize]?))
                .max();
        }
    }

    let mut chosen = Vec::with_capacity(groups.len());
    let mut b = cap;
    for g in 0..groups.len() {
        let target = best[g][b].expect("budget checked feasible");
        let i = *groups[g]
            .iter()
            .find(|&&i| {
                let c = items[i].cost as usize;
                c <= b && best[g + 1][b - c].map(|rest| lambdas[i] + rest) == Some(target)
            })
            .expect("optimum is attained");
        chosen.push(i);
        b -= items[i].cost as usize;
    }
    Ok(selection(items, lambdas, &chosen))
}

#[derive(Debug, Clone)]
struct PartialPack {
    cost: u64,
    profit: Vec<i64>,
    chosen: Vec<usize>,
}

fn strictly_better(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a != b
}

/// Every budget-feasible selection whose summed profit vector no other
/// feasible selection strictly dominates. Selections tying on profit are all
/// returned, sorted by within-group positions.
pub fn pareto_pack(items: &[KnapsackItem], budget: u64) -> Result<Vec<Selection>> {
    check_costs(items)?;
    let width = items[0].profit.as_ref().map(Vec::len).ok_or(Error::EmptyInput("items need profit vectors"))?;
    for it in items {
        let len = it.profit.as_ref().map_or(0, Vec::len);
        if it.profit.is_none() || len != width {
            return Err(Error::DimensionMismatch { expected: width, actual: len });
        }
    }
    let groups = groups(items);
    check_budget(items, &groups, budget)?;
    let cheapest_rest: Vec<u64> = (0..=groups.len()).map(|g| min_total(items, &groups[g..])).collect();

    let mut states = vec![PartialPack { cost: 0, profit: vec![0; width], chosen: Vec::new() }];
    for (g, members) in groups.iter().enumerate() {
        let mut next = Vec::new();
        for s in &states {
            for &i in members {
                let cost = s.cost + items[i].cost;
                if cost + cheapest_rest[g + 1] > budget {
                    continue;
                }
                let profit = s.profit.iter().zip(items[i].profit.as_ref().unwrap()).map(|(a, b)| a + b).collect();
                let mut chosen = s.chosen.clone();
                chosen.push(i);
                next.push(PartialPack { cost, profit, chosen });
            }
        }
        // A state no cheaper-or-equal state beats strictly on profit can
        // still finish on the front; drop only strictly dominated ones.
        let keep: Vec<bool> = next
            .iter()
            .map(|s| !next.iter().any(|t| t.cost <= s.cost && strictly_better(&t.profit, &s.profit)))
            .collect();
        states = next.into_iter().zip(keep).filter_map(|(s, k)| k.then_some(s)).collect();
    }
    let front: Vec<&PartialPack> =
        states.iter().filter(|s| !states.iter().any(|t| strictly_better(&t.profit, &s.profit))).collect();
    let mut out: Vec<(Vec<usize>, Selection)> = front
        .into_iter()
        .map(|s| {
            let pos: Vec<usize> =
                s.chosen.iter().zip(&groups).map(|(i, g)| g.iter().position(|x| x == i).unwrap()).collect();
            (pos, selection(items, &[], &s.chosen))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

/// Knapsack items from the model's leaves: cost is the estimate on
/// `cost_criterion`, utility priority comes from `utility`.
pub fn items_from_model(model: &MorphModel, cost_criterion: usize, utility: &Priorities) -> Result<Vec<KnapsackItem>> {
    if cost_criterion >= model.criteria.len() {
        return Err(Error::DimensionMismatch { expected: model.criteria.len(), actual: cost_criterion + 1 });
    }
    let mut out = Vec::new();
    for leaf in model.root.leaves() {
        let p = utility.get(&leaf.id).ok_or_else(|| Error::MissingPriorities(leaf.id.clone()))?;
        for a in &leaf.alternatives {
            let r = *p.get(&a.id).ok_or_else(|| Error::MissingPriorities(format!("{}/{}", leaf.id, a.id)))?;
            let cost = a.estimates[cost_criterion];
            if cost <= 0 {
                return Err(Error::NonpositiveCost(a.id.clone()));
            }
            out.push(KnapsackItem::new(&leaf.id, &a.id, cost as u64, r));
        }
    }
    Ok(out)
}
