//! Monte Carlo exit times of the logit revision chain from the all-first-
//! action state: median steps grow quickly with the population size.
//!
//! ```text
//! cargo run --release --example hitting_times
//! ```

use logit_hj::game::PayoffMatrix;
use logit_hj::mcsim::estimate_exit_stats;

fn main() -> logit_hj::Result<()> {
    let a = PayoffMatrix::identity(2);
    let stats = estimate_exit_stats(&a, &[20, 40, 80], 0.3, 200, 7, u64::MAX)?;
    for s in &stats {
        println!(
            "N = {:>3}: median {:>14.1}  mean {:>14.1}  p90 {:>14.1}  censored {}",
            s.population,
            s.median.unwrap_or(f64::NAN),
            s.mean.unwrap_or(f64::NAN),
            s.p90.unwrap_or(f64::NAN),
            s.censored
        );
    }
    Ok(())
}
