//! Relative-utility ordering and budgeted selection for the provider example.
//!
//! Prints the lambda ordering table, then the greedy and exact selections at
//! a few budgets.

use morphsynth::{exact_pack, fixtures, greedy_pack, lambda_order, report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = fixtures::example1();
    let items = doc.knapsack_items()?;
    let ordering = lambda_order(&items)?;
    print!("{}", report::ordering_table(&ordering));

    for budget in [15, 18, 19, 25] {
        println!("\nbudget {budget}");
        let exact = exact_pack(&items, &ordering.lambdas(), budget)?;
        println!("  exact : {} (cost {}, lambda {})", exact.label(), exact.total_cost, report::lambda_display(exact.total_lambda));
        let greedy = greedy_pack(&ordering, &items, budget)?;
        println!("  greedy: {} (cost {}, lambda {})", greedy.label(), greedy.total_cost, report::lambda_display(greedy.total_lambda));
    }
    Ok(())
}
