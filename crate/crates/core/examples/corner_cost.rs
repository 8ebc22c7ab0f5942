//! Cost of moving from the vertex `e_1` to the corner `y_1(r)` of the
//! restricted simplex, against an explicit bound linear in `r`.
//!
//! ```text
//! cargo run --release --example corner_cost
//! ```

use logit_hj::experiments::{corner_cost_bound, corner_cost_check};
use logit_hj::game::PayoffMatrix;
use logit_hj::solver::SolveConfig;

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let rs = [0.2, 0.1, 0.05];
    let rep = corner_cost_check(&a, 0.1, &rs, 100, &SolveConfig::default())?;
    for (item, r) in rep.items.iter().zip(rs) {
        println!("r = {r:<5} cost {:.6}  bound {:.6}", item.value, corner_cost_bound(&a, 0.1, r));
    }
    println!("{}", rep.notes.join("\n"));
    Ok(())
}
