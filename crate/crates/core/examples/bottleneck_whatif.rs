//! Find the weakest compatibility of a composite decision and ask what
//! happens to the Pareto set if it were improved.

use morphsynth::{compose_part, find_bottlenecks, fixtures, report, what_if_improve, CompatOverride};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = fixtures::example1();
    let model = doc.to_model();
    let priorities = doc.priorities("provider")?;
    let b = compose_part(&model, "B", priorities)?;
    print!("{}", report::pareto_table(&b));

    let weakest = b.find(&["W1", "D2", "O5"]).expect("W1*D2*O5 is in the set");
    let bottlenecks = find_bottlenecks(&model, weakest)?;
    println!("\nbottlenecks of {}: {}", weakest.label(), report::bottleneck_list(&bottlenecks));

    let pair = &bottlenecks[0];
    for value in [3, 1, 0] {
        let delta = what_if_improve(
            &model,
            priorities,
            CompatOverride {
                part_a: pair.part_a.clone(),
                alternative_a: pair.alternative_a.clone(),
                part_b: pair.part_b.clone(),
                alternative_b: pair.alternative_b.clone(),
                value,
            },
        )?;
        println!("\nset ({},{}) to {value}:", pair.alternative_a, pair.alternative_b);
        print!("{}", report::what_if_table(&delta));
    }
    Ok(())
}
