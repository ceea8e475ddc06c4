//! Run the three human-designed ordering heuristics on a few sets.

use vo_lab::heuristics::{Heuristic, Mode, TieBreaker};
use vo_lab::polyset::parse_polyset;

fn main() -> vo_lab::Result<()> {
    let sets = [
        "x1^2 - x2; x3^3 - 1",
        "x1*x2*x3 - 1; x2^4 + x3",
        "x1^3 + x2^2 + x3; x1 - x2*x3^2",
    ];
    for text in sets {
        let set = parse_polyset(text, 3)?;
        println!("{set}");
        for h in Heuristic::ALL {
            let o = h.order(&set, TieBreaker::new(0));
            let p = h.order_with(&set, TieBreaker::new(0), Mode::Projected);
            println!("  {:<6} {o}   (recomputed after projection: {p})", h.name());
        }
        let crit: Vec<String> = (0..3)
            .map(|v| {
                let c: Vec<String> = Heuristic::Brown.criteria(&set, v).iter().map(ToString::to_string).collect();
                format!("x{}=({})", v + 1, c.join(","))
            })
            .collect();
        println!("  brown criteria per variable: {}", crit.join(" "));
    }
    Ok(())
}
