//! Rank every leaf of the provider example into three priority layers with
//! dominance peeling and with weighted outranking, next to the priorities
//! the bundled scenario supplies.

use morphsynth::ranking::{rank, RankingConfig, RankingMethod};
use morphsynth::{fixtures, report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = fixtures::example1();
    let model = doc.scenario_model("provider")?;
    let supplied = doc.priorities("provider")?;
    let dominance = RankingConfig::default();
    let outranking = RankingConfig { method: RankingMethod::WeightedOutranking, ..RankingConfig::default() };
    let external = RankingConfig { method: RankingMethod::External, ..RankingConfig::default() };

    for leaf in model.root.leaves() {
        println!("-- {} --", leaf.id);
        print!("  dominance   {}", report::priority_table(&leaf.id, &rank(&model, &leaf.id, &dominance, None)?));
        print!("  outranking  {}", report::priority_table(&leaf.id, &rank(&model, &leaf.id, &outranking, None)?));
        let given = rank(&model, &leaf.id, &external, supplied.get(&leaf.id))?;
        print!("  supplied    {}", report::priority_table(&leaf.id, &given));
    }
    Ok(())
}
