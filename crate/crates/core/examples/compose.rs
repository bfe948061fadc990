//! Compose the bundled application examples bottom-up and print every
//! node's Pareto set.
//!
//! Run with `cargo run -p morphsynth --example compose [example1|example2|example3]`.

use morphsynth::{compose_tree, fixtures, report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let names = if names.is_empty() { vec!["example1".into(), "example2".into(), "example3".into()] } else { names };
    for name in names {
        let doc = fixtures::load(&name).ok_or_else(|| format!("no bundled problem `{name}`"))?;
        let model = doc.to_model();
        for scenario in &doc.scenarios {
            println!("== {name} / {} ==", scenario.name);
            match compose_tree(&model, &scenario.priorities) {
                Ok(sets) => {
                    for set in sets.values().filter(|s| model.root.find(&s.node).is_some_and(|n| !n.is_leaf())) {
                        print!("{}", report::pareto_table(set));
                    }
                }
                Err(e) => println!("{e}"),
            }
            println!();
        }
    }
    Ok(())
}
