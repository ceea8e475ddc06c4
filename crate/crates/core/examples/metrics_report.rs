//! Score every ordering of one hand-timed problem.

use vo_lab::dataset::ProblemRecord;
use vo_lab::metrics::evaluate_strategy;
use vo_lab::polyset::{parse_polyset, VariableOrdering};

fn main() -> vo_lab::Result<()> {
    let set = parse_polyset("x1^2 - x2; x3^3 - 1", 3)?;
    // one run timed out at 30s; it counts as 60s
    let timings = vec![Some(22.16), Some(17.14), None, Some(24.87), Some(16.06), Some(22.58)];
    let record = ProblemRecord::new("demo", "hand", set, timings, 30.0, None)?;
    println!("optimal time {}", record.optimal_time());
    for o in VariableOrdering::all(3) {
        let rep = evaluate_strategy(std::slice::from_ref(&o), std::slice::from_ref(&record))?;
        println!(
            "{o}: time {:>5} solved {} accurate {} markup {:.4}",
            record.penalized(&o),
            rep.solved,
            rep.time_accuracy,
            rep.markup
        );
    }
    Ok(())
}
