//! Validate the bundled problems, then show the diagnostics produced for a
//! deliberately broken copy of the provider example.

use morphsynth::{fixtures, parse_problem_str, report, validate_model};

fn main() {
    for (name, text) in fixtures::ALL {
        let doc = parse_problem_str(text).expect("bundled fixtures parse");
        let model = doc.to_model();
        let leaves = model.root.leaves();
        let alternatives: usize = leaves.iter().map(|l| l.alternatives.len()).sum();
        println!(
            "{name}: {} leaves, {alternatives} alternatives, {} compatibility matrices, {} violation(s)",
            leaves.len(),
            model.compat.len(),
            validate_model(&model).len()
        );
    }

    let mut model = fixtures::example1().to_model();
    model.compat[3].values[1][4] = 4;
    let w = model.root.find_mut("W").unwrap();
    w.alternatives.push(w.alternatives[0].clone());
    model.root.find_mut("A").unwrap().children.pop();
    println!("\nbroken copy:");
    print!("{}", report::violations_table(&validate_model(&model)));

    let mut doc = fixtures::example1();
    doc.tree.find_mut("M").unwrap().alternatives[0].estimates[0] = 9;
    match parse_problem_str(&doc.to_json()) {
        Ok(_) => println!("\nunexpectedly valid"),
        Err(e) => println!("\nestimate out of scale: {e}"),
    }
}
