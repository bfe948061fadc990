//! Three planning stages of the provider example: solve each stage, then
//! compose a trajectory that accounts for components changed between stages.

use morphsynth::{fixtures, report, stage_solve, synthesize, ChangeCostConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = fixtures::example1();
    let model = doc.to_model();
    let stages = doc.stage_specs()?;
    for stage in &stages {
        let sets = stage_solve(&model, stage)?;
        println!("== {} ==", stage.label);
        print!("{}", report::pareto_table(&sets[&model.root.id]));
    }
    let config = ChangeCostConfig::default();
    println!("\nchange-count mapping: {:?}", config.thresholds);
    print!("{}", report::trajectory_table(&synthesize(&model, &stages, &config)?));
    Ok(())
}
