//! Monotone convergence `V_r ↓ V` as the boundary floor shrinks, and a joint
//! schedule `(η, r_η)` for the finite-noise values.
//!
//! ```text
//! cargo run --release --example r_sweep
//! ```

use logit_hj::experiments::{coupled_limit, sweep_r, Compact};
use logit_hj::game::PayoffMatrix;
use logit_hj::solver::SolveConfig;

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let cfg = SolveConfig::default();
    let compact = Compact { min_coord: 0.2 };
    let rep = sweep_r(&a, 60, &[0.2, 0.1, 0.05], compact, &cfg)?;
    for c in &rep.checks {
        println!("{:<24} excess {:+.3e} (allowed {:.3e})", c.label, c.value, c.bound);
    }
    let coupled = coupled_limit(&a, 60, &[(0.2, 0.2), (0.1, 0.1), (0.05, 0.05)], compact, &cfg)?;
    for row in &coupled.rows {
        println!("eta = r = {:<5} gap to V on K: {:.6}", row.parameter, row.gap);
    }
    Ok(())
}
