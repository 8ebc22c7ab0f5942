//! The finite-noise running cost of a swap `e_j - e_i` grows like
//! `-η ln x_i` as the source coordinate vanishes.
//!
//! ```text
//! cargo run --example blowup
//! ```

use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::{SimplexPoint, TangentVector};
use logit_hj::hamiltonian::{legendre_l_eta, RaySolverConfig};

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let eta = 0.1;
    let v = TangentVector::swap(3, 1, 2);
    println!("{:>8} {:>12} {:>12}", "x_2", "L^eta", "bound");
    for c in [0.2, 0.1, 0.05, 0.02, 0.01, 0.001] {
        let x = SimplexPoint::new(vec![0.5, c, 0.5 - c])?;
        let l = legendre_l_eta(&a, eta, &x, &v, &RaySolverConfig::default())?;
        println!("{c:>8} {l:>12.6} {:>12.6}", -eta * c.ln() - eta * 2f64.ln());
    }
    Ok(())
}
