//! Project a set variable by variable and compare the proxy cost of every ordering.

use vo_lab::polyset::{parse_polyset, VariableOrdering};
use vo_lab::projection::{cascade, discriminant, proxy_costs, resultant};

fn main() -> vo_lab::Result<()> {
    let set = parse_polyset("x1^2 + x2^2 + x3^2 - 1; x1*x2 - x3; x3^2 - x1", 3)?;
    let p = &set.polys()[0];
    let q = &set.polys()[1];
    println!("disc_x3({p}) = {}", discriminant(p, 2)?);
    println!("res_x3({p}, {q}) = {}", resultant(p, q, 2)?);

    let o = VariableOrdering::identity(3);
    let c = cascade(&set, &o);
    for (i, level) in c.levels.iter().enumerate() {
        println!("level {i}: {} polynomials, {level}", level.len());
    }
    println!("cost under {o}: {}", c.cost().0);

    for (o, cost) in VariableOrdering::all(3).iter().zip(proxy_costs(&set)) {
        println!("{o}: {}", cost.0);
    }
    Ok(())
}
