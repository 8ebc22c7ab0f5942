//! Target problems with a user-supplied seed set: here the cost of reaching
//! states where the third action is used by at least half the population.
//!
//! ```text
//! cargo run --release --example custom_target
//! ```

use std::sync::Arc;

use logit_hj::game::{PayoffMatrix, Target};
use logit_hj::geometry::BarycentricGrid;
use logit_hj::hamiltonian::CostKind;
use logit_hj::solver::{solve_target_set, SolveConfig};

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let m = 40;
    let grid = Arc::new(BarycentricGrid::new(3, m, 0.0)?);
    let target = Target::Custom(Arc::new(move |k: &[u32]| 2 * k[2] >= m));
    let v = solve_target_set(grid.clone(), &a, &target, CostKind::Limit, &SolveConfig::default())?;
    for i in 0..3 {
        println!("cost from e{}: {:.6}", i + 1, v.value(grid.corner(i)));
    }
    Ok(())
}
