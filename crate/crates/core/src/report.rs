//! Plain-text renderings of results, shared by the command line and the
//! examples.

use std::fmt::Write;

use crate::composition::{Bottleneck, ParetoSet, WhatIfDelta};
use crate::mckp::{KnapsackOrdering, Rational, Selection};
use crate::model::{PriorityAssignment, Violation};
use crate::trajectory::Trajectory;

/// `lambda` rounded to two decimals.
pub fn lambda_display(lambda: Rational) -> String {
    format!("{:.2}", *lambda.numer() as f64 / *lambda.denom() as f64)
}

pub fn bottleneck_list(bottlenecks: &[Bottleneck]) -> String {
    bottlenecks.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn pareto_table(set: &ParetoSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "node {}: {} decision(s)", set.node, set.len());
    let width = set.decisions.iter().map(|d| d.label().len()).max().unwrap_or(0);
    for d in &set.decisions {
        let _ = write!(out, "  {:<width$}  {}", d.label(), d.quality);
        if !d.bottlenecks.is_empty() {
            let _ = write!(out, "  bottlenecks: {}", bottleneck_list(&d.bottlenecks));
        }
        out.push('\n');
    }
    out
}

pub fn priority_table(leaf: &str, assignment: &PriorityAssignment) -> String {
    let cells: Vec<String> = assignment.iter().map(|(alt, r)| format!("{alt}({r})")).collect();
    format!("{leaf}: {}\n", cells.join(" "))
}

pub fn ordering_table(ordering: &KnapsackOrdering) -> String {
    let mut out = format!("{:<6} {:>5} {:>6} {:>4}\n", "item", "r", "lambda", "pi");
    for e in &ordering.entries {
        let _ = writeln!(out, "{:<6} {:>5} {:>6} {:>4}", e.id, e.utility_priority, lambda_display(e.lambda), e.rank);
    }
    let _ = writeln!(out, "r_hat = {}", ordering.r_hat);
    out
}

pub fn selection_lines(sel: &Selection) -> String {
    let mut out = format!("selection: {}\ncost: {}\n", sel.label(), sel.total_cost);
    let _ = writeln!(out, "lambda: {} ({})", lambda_display(sel.total_lambda), sel.total_lambda);
    if let Some(p) = &sel.total_profit {
        let _ = writeln!(out, "profit: {p:?}");
    }
    out
}

pub fn trajectory_table(trajectories: &[Trajectory]) -> String {
    let mut out = format!("{} trajectory(ies)\n", trajectories.len());
    for t in trajectories {
        let changes: Vec<String> = t.transitions.iter().map(|tr| format!("{}->{}", tr.changes, tr.compat)).collect();
        let _ = writeln!(out, "  <{}>  {}  changes: {}", t.labels().join(", "), t.quality, changes.join(" "));
    }
    out
}

pub fn violations_table(violations: &[Violation]) -> String {
    violations.iter().map(|v| format!("{v}\n")).collect()
}

pub fn what_if_table(delta: &WhatIfDelta) -> String {
    if delta.is_empty() {
        return format!("node {}: no change\n", delta.node);
    }
    let mut out = format!("node {}\n", delta.node);
    for d in &delta.entered {
        let _ = writeln!(out, "  + {}  {}", d.label(), d.quality);
    }
    for d in &delta.left {
        let _ = writeln!(out, "  - {}  {}", d.label(), d.quality);
    }
    for c in &delta.changed {
        let label = c.choice.values().cloned().collect::<Vec<_>>().join("*");
        let _ = writeln!(out, "  ~ {label}  {} -> {}", c.before, c.after);
    }
    out
}
