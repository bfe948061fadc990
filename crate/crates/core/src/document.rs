//! JSON problem documents: the model plus named priority scenarios, planning
//! stages and an optional knapsack section.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mckp::{items_from_model, KnapsackItem};
use crate::model::{
    validate_model, CompatibilityMatrix, CriterionSpec, MorphModel, MorphNode, Priorities, Scales, Violation,
};
use crate::trajectory::StageSpec;

pub const FORMAT_VERSION: &str = "1.0";

/// A named set of priorities, optionally tied to the criteria weights it was
/// derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i32>>,
    pub priorities: Priorities,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageRef {
    pub label: String,
    pub scenario: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackSection {
    /// Zero-based index of the criterion whose estimate is the item cost.
    pub cost_criterion: usize,
    /// Utility priority of every alternative, keyed by leaf.
    pub utility_priorities: Priorities,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub scales: Scales,
    pub criteria: Vec<CriterionSpec>,
    pub tree: MorphNode,
    #[serde(default)]
    pub compatibility: Vec<CompatibilityMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<Scenario>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knapsack: Option<KnapsackSection>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("schema error at `{path}` (line {line}, column {column}): {message}")]
    Schema { path: String, line: usize, column: usize, message: String },

    #[error("unsupported format_version `{0}` (expected {FORMAT_VERSION})")]
    UnsupportedVersion(String),

    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),

    #[error("invalid reference: {0}")]
    Reference(String),
}

/// Parse and fully check a problem document.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemDocument, DocumentError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: ProblemDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        match inner.classify() {
            serde_json::error::Category::Data => Ok(DocumentError::Schema { path, line, column, message: inner.to_string() }),
            _ => Err(DocumentError::Syntax { line, column, message: inner.to_string() }),
        }
        .unwrap_or_else(|e| e)
    })?;
    doc.check()?;
    Ok(doc)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemDocument, DocumentError> {
    parse_problem(text.as_bytes())
}

impl ProblemDocument {
    pub fn from_model(model: &MorphModel) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            name: None,
            description: None,
            scales: model.scales,
            criteria: model.criteria.clone(),
            tree: model.root.clone(),
            compatibility: model.compat.clone(),
            scenarios: Vec::new(),
            stages: Vec::new(),
            knapsack: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn to_model(&self) -> MorphModel {
        MorphModel { criteria: self.criteria.clone(), root: self.tree.clone(), compat: self.compatibility.clone(), scales: self.scales }
    }

    /// Model with a scenario's criteria weights applied, when it has any.
    pub fn scenario_model(&self, name: &str) -> Result<MorphModel, crate::Error> {
        let model = self.to_model();
        match &self.scenario(name)?.weights {
            Some(w) => model.with_weights(w),
            None => Ok(model),
        }
    }

    pub fn scenario(&self, name: &str) -> Result<&Scenario, crate::Error> {
        self.scenarios.iter().find(|s| s.name == name).ok_or_else(|| crate::Error::UnknownScenario(name.to_string()))
    }

    /// The named scenario, or the first one when no name is given.
    pub fn scenario_or_default(&self, name: Option<&str>) -> Result<&Scenario, crate::Error> {
        match name {
            Some(n) => self.scenario(n),
            None => self.scenarios.first().ok_or(crate::Error::EmptyInput("document has no scenarios")),
        }
    }

    pub fn priorities(&self, scenario: &str) -> Result<&Priorities, crate::Error> {
        Ok(&self.scenario(scenario)?.priorities)
    }

    pub fn stage_specs(&self) -> Result<Vec<StageSpec>, crate::Error> {
        self.stages
            .iter()
            .map(|s| Ok(StageSpec::new(&s.label, self.priorities(&s.scenario)?.clone())))
            .collect()
    }

    pub fn knapsack_items(&self) -> Result<Vec<KnapsackItem>, crate::Error> {
        let k = self.knapsack.as_ref().ok_or(crate::Error::EmptyInput("document has no knapsack section"))?;
        items_from_model(&self.to_model(), k.cost_criterion, &k.utility_priorities)
    }

    /// Everything beyond serde's shape checks: version, model invariants and
    /// cross references.
    pub fn check(&self) -> Result<(), DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocumentError::UnsupportedVersion(self.format_version.clone()));
        }
        let model = self.to_model();
        let violations = validate_model(&model);
        if !violations.is_empty() {
            return Err(DocumentError::Invalid(violations));
        }
        let index = model.index().map_err(|e| DocumentError::Reference(e.to_string()))?;
        let mut names = HashSet::new();
        for s in &self.scenarios {
            if !names.insert(s.name.as_str()) {
                return Err(DocumentError::Reference(format!("scenario `{}` defined twice", s.name)));
            }
            if let Some(w) = &s.weights {
                if w.len() != self.criteria.len() || w.contains(&0) {
                    return Err(DocumentError::Reference(format!(
                        "scenario `{}` needs {} nonzero weights",
                        s.name,
                        self.criteria.len()
                    )));
                }
            }
            check_priorities(&index, &s.priorities).map_err(|e| DocumentError::Reference(format!("scenario `{}`: {e}", s.name)))?;
        }
        for st in &self.stages {
            if !names.contains(st.scenario.as_str()) {
                return Err(DocumentError::Reference(format!("stage `{}` uses unknown scenario `{}`", st.label, st.scenario)));
            }
        }
        if let Some(k) = &self.knapsack {
            if k.cost_criterion >= self.criteria.len() {
                return Err(DocumentError::Reference(format!("cost criterion {} out of range", k.cost_criterion)));
            }
            check_utility(&index, &k.utility_priorities)
                .map_err(|e| DocumentError::Reference(format!("knapsack: {e}")))?;
        }
        Ok(())
    }
}

fn unknown_keys(index: &crate::model::ModelIndex, p: &Priorities) -> Result<(), String> {
    for (leaf, assignment) in p {
        let pos = index.leaf_position(leaf).map_err(|e| e.to_string())?;
        for alt in assignment.keys() {
            index.alternative_position(pos, alt).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn check_priorities(index: &crate::model::ModelIndex, p: &Priorities) -> Result<(), String> {
    unknown_keys(index, p)?;
    index.priority_table(p).map(|_| ()).map_err(|e| e.to_string())
}

/// Utility priorities must be total and positive but are not capped by the
/// layer count.
fn check_utility(index: &crate::model::ModelIndex, p: &Priorities) -> Result<(), String> {
    unknown_keys(index, p)?;
    for leaf in &index.leaves {
        let a = p.get(&leaf.id).ok_or_else(|| format!("missing priorities for part `{}`", leaf.id))?;
        for alt in &leaf.alternatives {
            match a.get(alt) {
                Some(0) | None => return Err(format!("alternative `{}/{alt}` needs a priority >= 1", leaf.id)),
                Some(_) => {}
            }
        }
    }
    Ok(())
}
