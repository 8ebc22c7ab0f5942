//! The zero level set `N(x)` of the limit Hamiltonian and the sublevel set
//! `N^η(x)`, with the support-function edge costs they induce.
//!
//! ```text
//! cargo run --example level_sets > levelset.txt
//! ```

use logit_hj::experiments::levelset_polygon;
use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::{SimplexPoint, TangentVector};
use logit_hj::hamiltonian::{support_cost_eta, support_cost_limit, RaySolverConfig};

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(3);
    let x = SimplexPoint::new(vec![0.5, 0.3, 0.2])?;
    let cfg = RaySolverConfig::default();
    for (i, j) in [(0, 1), (0, 2), (1, 0)] {
        let d = TangentVector::swap(3, i, j);
        println!(
            "swap {}->{}: sigma = {:.6}, sigma^0.1 = {:.6}",
            i + 1,
            j + 1,
            support_cost_limit(&a, &x, &d),
            support_cost_eta(&a, 0.1, &x, &d, &cfg)?
        );
    }
    let ls = levelset_polygon(&a, 0.1, &x, 72, &cfg)?;
    println!("# N(x) vertices");
    for p in &ls.limit {
        println!("{:.6} {:.6}", p[0], p[1]);
    }
    println!("# N^eta(x) boundary");
    for p in &ls.eta {
        println!("{:.6} {:.6}", p[0], p[1]);
    }
    Ok(())
}
