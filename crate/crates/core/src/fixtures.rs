//! The three bundled application examples: a Web-based system infrastructure
//! evaluated for a communication provider (with two further planning stages
//! and a knapsack section), a corporate application and an academic one.

use crate::document::{parse_problem_str, ProblemDocument};

pub const EXAMPLE1: &str = include_str!("../fixtures/example1.json");
pub const EXAMPLE2: &str = include_str!("../fixtures/example2.json");
pub const EXAMPLE3: &str = include_str!("../fixtures/example3.json");

/// Bundled fixture names and their JSON text.
pub const ALL: [(&str, &str); 3] = [("example1", EXAMPLE1), ("example2", EXAMPLE2), ("example3", EXAMPLE3)];

pub fn source(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Parse a bundled fixture by name.
pub fn load(name: &str) -> Option<ProblemDocument> {
    source(name).map(|text| parse_problem_str(text).expect("bundled fixtures are valid"))
}

pub fn example1() -> ProblemDocument {
    load("example1").unwrap()
}

pub fn example2() -> ProblemDocument {
    load("example2").unwrap()
}

pub fn example3() -> ProblemDocument {
    load("example3").unwrap()
}
