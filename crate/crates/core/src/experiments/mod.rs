//! Numerical verification runs: convergence sweeps and pass/fail checks.
//!
//! Every report carries its thresholds next to the measured values, so a
//! report can be judged without knowing how it was produced.

mod checks;
mod sweeps;

pub use checks::{
    barrier_check, blowup_check, blowup_points, corner_cost_bound, corner_cost_check, delta_bar, eta_ceiling,
    inclusion_check, levelset_polygon, lipschitz_uniformity_check, noncoercivity_probe, sample_outside_d,
    max_first_payoff_on_b1, swap_anisotropy, BarrierParams, InclusionParams, LevelSet,
};
pub use sweeps::{coupled_limit, sweep_eta_full, sweep_eta_restricted, sweep_r};

use serde::{Deserialize, Serialize};

use crate::geometry::BarycentricGrid;

/// Slack added to every grid-versus-continuum comparison.
pub fn grid_slack(m: u32) -> f64 {
    4.0 / m as f64
}

/// Relative slack allowed when checking that a gap sequence decreases.
pub const TREND_SLACK: f64 = 0.05;

/// One parameter value of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub parameter: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
}

/// A named comparison `value` against `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckItem {
    /// Passes when `value <= bound`.
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckItem { label: label.into(), value, bound, pass: value <= bound }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(label: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckItem { label: label.into(), value, bound, pass: value >= bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub name: String,
    pub parameter: String,
    pub rows: Vec<ReportRow>,
    /// Side conditions checked along the sweep.
    pub checks: Vec<CheckItem>,
    pub notes: Vec<String>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub items: Vec<CheckItem>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|c| !c.pass)
    }

    /// The failing item with the largest excess over its bound, if any.
    pub fn worst(&self) -> Option<&CheckItem> {
        self.failures().max_by(|a, b| (a.value - a.bound).abs().total_cmp(&(b.value - b.bound).abs()))
    }
}

/// Compact sub-simplex `{x : x_i ≥ min_coord}` used to restrict sup-norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compact {
    pub min_coord: f64,
}

impl Compact {
    pub fn contains(&self, grid: &BarycentricGrid, node: usize) -> bool {
        let m = grid.denominator() as f64;
        grid.numerators(node).iter().all(|&k| k as f64 >= self.min_coord * m - 1e-9)
    }
}

/// Marks each row against `(1 + TREND_SLACK)` times the previous gap.
pub(crate) fn trend_rows(params: &[f64], gaps: &[f64], times: &[f64]) -> Vec<ReportRow> {
    let mut rows = Vec::with_capacity(gaps.len());
    for k in 0..gaps.len() {
        let tolerance = if k == 0 { f64::INFINITY } else { gaps[k - 1] * (1.0 + TREND_SLACK) };
        rows.push(ReportRow {
            parameter: params[k],
            gap: gaps[k],
            tolerance,
            pass: gaps[k] <= tolerance,
            wall_time_ms: times[k],
        });
    }
    rows
}
