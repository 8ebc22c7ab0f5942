//! Minimal cost of leaving the basin of the first action in a three-action
//! coordination game, and the optimal exit path from the vertex `e_1`.
//!
//! ```text
//! cargo run --release --example target_value
//! ```

use std::sync::Arc;

use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::BarycentricGrid;
use logit_hj::hamiltonian::CostKind;
use logit_hj::solver::{reconstruct_path, solve_target, SolveConfig};

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::coordination(vec![vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])?;
    let grid = Arc::new(BarycentricGrid::new(3, 60, 0.0)?);
    let v = solve_target(grid.clone(), &a, CostKind::Limit, &SolveConfig::default())?;
    let start = grid.corner(0);
    println!("V(e1) = {:.6} on {} nodes", v.value(start), grid.len());

    let path = reconstruct_path(&v, start)?;
    println!("optimal exit path, {} steps:", path.nodes.len() - 1);
    for (i, &node) in path.nodes.iter().enumerate().step_by(5) {
        println!("  {i:>3} x = {:?} V = {:.6}", grid.coords(node), v.value(node));
    }

    // The finite-noise value on the restricted simplex X_r.
    let inner = Arc::new(BarycentricGrid::new(3, 60, 0.1)?);
    let v_eta = solve_target(inner.clone(), &a, CostKind::Eta(0.1), &SolveConfig::default())?;
    println!("V^0.1_r at the corner of X_r: {:.6}", v_eta.value(inner.corner(0)));
    Ok(())
}
