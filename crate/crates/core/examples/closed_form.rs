//! Two-action value functions in closed form: the small-noise value `V`,
//! the finite-noise value `V^η` and its plateau threshold `δ_η`.
//!
//! ```text
//! cargo run --example closed_form
//! ```

use logit_hj::closedform::{delta_eta, mixed_equilibrium, v_eta_1d, v_limit_1d, TwoActionGame};

fn main() -> logit_hj::Result<()> {
    let g = TwoActionGame::new(1.0, 1.0)?;
    println!("mixed equilibrium x1* = {}", mixed_equilibrium(&g));
    for eta in [0.3, 0.1] {
        println!("eta = {eta}: delta_eta = {:.6}", delta_eta(&g, eta)?);
    }
    println!("{:>6} {:>10} {:>10} {:>10}", "x1", "V", "V^0.3", "V^0.1");
    for k in 0..=10 {
        let x1 = k as f64 / 10.0;
        println!(
            "{x1:>6.2} {:>10.6} {:>10.6} {:>10.6}",
            v_limit_1d(&g, x1),
            v_eta_1d(&g, 0.3, x1)?,
            v_eta_1d(&g, 0.1, x1)?
        );
    }
    Ok(())
}
