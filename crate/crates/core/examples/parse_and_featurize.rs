//! Parse a polynomial set and print its per-variable features and sparsity graph.
//!
//! ```text
//! cargo run --example parse_and_featurize
//! cargo run --example parse_and_featurize -- "x1*x2 - 1; x2^2 + x3" 3
//! ```

use vo_lab::features::{feature_names, sparsity_graph, variable_features};
use vo_lab::polyset::{parse_polyset, parse_smtlib_atoms};

fn main() -> vo_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "x1^2 - x2; x3^3 - 1; x1*x3 + 2x2".into());
    let nvars = args.next().map_or(Ok(3), |n| n.parse()).expect("nvars is a number");
    let set = parse_polyset(&text, nvars)?;
    println!("set: {set}");

    let names = feature_names();
    for v in 0..nvars {
        let f = variable_features(&set, v);
        let shown: Vec<String> =
            names.iter().zip(&f.values).filter(|(_, x)| **x != 0.0).map(|(n, x)| format!("{n}={x}")).collect();
        println!("x{}: {}", v + 1, shown.join(" "));
    }
    let g = sparsity_graph(&set);
    println!("sparsity graph edges: {:?}", g.edges().iter().map(|(a, b)| (a + 1, b + 1)).collect::<Vec<_>>());

    // atoms of an SMT-LIB script become `lhs - rhs`
    let smt = "(declare-fun a () Real)(declare-fun b () Real)\n(assert (and (> (* a a) b) (< (+ a b) 1)))";
    println!("from SMT-LIB: {}", parse_smtlib_atoms(smt)?);
    Ok(())
}
