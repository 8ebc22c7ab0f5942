//! Convergence of the finite-noise value `V^η_r` to `V_r` as `η ↓ 0` on a
//! restricted three-action simplex.
//!
//! ```text
//! cargo run --release --example eta_sweep
//! ```

use logit_hj::experiments::sweep_eta_restricted;
use logit_hj::game::PayoffMatrix;
use logit_hj::solver::SolveConfig;

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let rep = sweep_eta_restricted(&a, 0.1, 60, &[0.4, 0.2, 0.1, 0.05], &SolveConfig::default())?;
    for note in &rep.notes {
        println!("# {note}");
    }
    for row in &rep.rows {
        println!("eta = {:<5} sup gap = {:.6} ({:.0} ms)", row.parameter, row.gap, row.wall_time_ms);
    }
    println!("trend {}", if rep.pass() { "holds" } else { "violated" });
    Ok(())
}
