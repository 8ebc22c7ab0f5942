//! Source problem: the cost `W` of reaching each state from a seed set, here
//! the vertex `e_1` of a two-action game.
//!
//! ```text
//! cargo run --example source_value
//! ```

use std::sync::Arc;

use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::{BarycentricGrid, SimplexPoint};
use logit_hj::hamiltonian::CostKind;
use logit_hj::solver::{solve_source, SolveConfig};

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(2);
    let grid = Arc::new(BarycentricGrid::new(2, 100, 0.0)?);
    let w = solve_source(grid.clone(), &a, &[grid.corner(0)], CostKind::Limit, &SolveConfig::default())?;
    for x1 in [1.0, 0.75, 0.5, 0.25, 0.0] {
        let x = SimplexPoint::new(vec![x1, 1.0 - x1])?;
        println!("W({x1:.2}) = {:.6}", w.value_near(&x));
    }
    Ok(())
}
