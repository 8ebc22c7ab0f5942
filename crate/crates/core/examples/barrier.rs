//! Barrier construction near the target set: the scaled zero level set
//! `θN(x)` sits inside `N^η(x)` once `η` is small, and the finite-noise
//! value then dominates `θ(V_r - δ)`.
//!
//! ```text
//! cargo run --release --example barrier
//! ```

use std::sync::Arc;

use logit_hj::experiments::{
    barrier_check, delta_bar, eta_ceiling, inclusion_check, sample_outside_d, BarrierParams, InclusionParams,
};
use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::BarycentricGrid;
use logit_hj::hamiltonian::CostKind;
use logit_hj::solver::{solve_target, SolveConfig};

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let (r, theta, delta) = (0.1, 0.9, 0.05);
    let cfg = SolveConfig::default();
    let grid = Arc::new(BarycentricGrid::new(3, 60, r)?);
    let v_r = solve_target(grid.clone(), &a, CostKind::Limit, &cfg)?;

    let nodes = sample_outside_d(&a, &v_r, delta, usize::MAX);
    let eta = eta_ceiling(r, theta, delta_bar(&a, &grid, &nodes));
    println!("{} nodes outside D, eta ceiling {eta:.6}", nodes.len());

    let inc = inclusion_check(&a, &v_r, &InclusionParams { r, eta, theta, delta, samples: 200 })?;
    println!("inclusion: {} of {} points pass", inc.items.len() - inc.failures().count(), inc.items.len());

    let v_eta = solve_target(grid, &a, CostKind::Eta(eta), &cfg)?;
    let bar = barrier_check(&v_r, &v_eta, &BarrierParams { theta, delta })?;
    println!("barrier: {}", if bar.pass() { "holds at every node" } else { "violated" });
    Ok(())
}
