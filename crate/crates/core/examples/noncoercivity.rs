//! At the vertex `e_1` the finite-noise Hamiltonian stays bounded along the
//! ray `s·(0, -1, -1)`, so `H^η(e_1, ·)` is not coercive.
//!
//! ```text
//! cargo run --example noncoercivity
//! ```

use logit_hj::experiments::noncoercivity_probe;
use logit_hj::game::PayoffMatrix;

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    for eta in [0.2, 0.1, 0.05] {
        let rep = noncoercivity_probe(&a, eta, &[1.0, 10.0, 100.0, 1000.0])?;
        println!("{}", rep.notes.join("; "));
        for item in rep.items.iter().filter(|i| i.label.contains("< 0")) {
            println!("  {:<32} {:.12e}", item.label, item.value);
        }
    }
    Ok(())
}
