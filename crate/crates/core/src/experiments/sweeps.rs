use std::sync::Arc;
use std::time::Instant;

use super::{grid_slack, trend_rows, CheckItem, Compact, ReportRow, SweepReport};
use crate::error::{invalid, Result};
use crate::game::PayoffMatrix;
use crate::geometry::BarycentricGrid;
use crate::hamiltonian::CostKind;
use crate::solver::{solve_target, SolveConfig, ValueField};

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn decreasing(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return invalid(format!("{what} list is empty"));
    }
    if values.windows(2).any(|w| !(w[0] > w[1])) {
        return invalid(format!("{what} values must be strictly decreasing"));
    }
    Ok(())
}

/// `sup |f - g|` over the nodes of `f`'s grid accepted by `keep`, matching
/// nodes of `g` by lattice numerators. Infinite when exactly one side is.
fn sup_gap(f: &ValueField, g: &ValueField, keep: impl Fn(usize) -> bool) -> f64 {
    let mut gap = 0.0_f64;
    for node in 0..f.grid().len() {
        if !keep(node) {
            continue;
        }
        let Some(other) = g.grid().index_of(f.grid().numerators(node)) else { continue };
        let (a, b) = (f.value(node), g.value(other));
        if a.is_finite() && b.is_finite() {
            gap = gap.max((a - b).abs());
        } else if a.is_finite() != b.is_finite() {
            return f64::INFINITY;
        }
    }
    gap
}

/// Sup-norm gap `|V^η_r - V_r|` on `X_r` for decreasing `η`.
pub fn sweep_eta_restricted(
    a: &PayoffMatrix,
    r: f64,
    m: u32,
    etas: &[f64],
    cfg: &SolveConfig,
) -> Result<SweepReport> {
    decreasing(etas, "eta")?;
    if !(r > 0.0) {
        return invalid("the restricted sweep needs r > 0");
    }
    let grid = Arc::new(BarycentricGrid::new(a.n(), m, r)?);
    let limit = solve_target(grid.clone(), a, CostKind::Limit, cfg)?;
    let mut gaps = Vec::new();
    let mut times = Vec::new();
    for &eta in etas {
        let t = Instant::now();
        let field = solve_target(grid.clone(), a, CostKind::Eta(eta), cfg)?;
        gaps.push(sup_gap(&field, &limit, |_| true));
        times.push(elapsed_ms(t));
    }
    let regime: Vec<String> =
        etas.iter().map(|e| format!("eta={e}: eta*(ln 2 - ln r)={:.6}", e * (2f64.ln() - r.ln()))).collect();
    Ok(SweepReport {
        name: "sweep-eta".into(),
        parameter: "eta".into(),
        rows: trend_rows(etas, &gaps, &times),
        checks: Vec::new(),
        notes: [vec![format!("n={} M={m} r={r} nodes={}", a.n(), grid.len())], regime].concat(),
    })
}

/// Exploratory: `|V^η - V|` with `V^η` on the grid with floor `1/M` and `V`
/// on the full grid. No pass/fail gate.
pub fn sweep_eta_full(a: &PayoffMatrix, m: u32, etas: &[f64], cfg: &SolveConfig) -> Result<SweepReport> {
    decreasing(etas, "eta")?;
    let full = Arc::new(BarycentricGrid::new(a.n(), m, 0.0)?);
    let inner = Arc::new(BarycentricGrid::with_floor(a.n(), m, 1)?);
    let limit = solve_target(full, a, CostKind::Limit, cfg)?;
    let mut rows = Vec::new();
    for &eta in etas {
        let t = Instant::now();
        let field = solve_target(inner.clone(), a, CostKind::Eta(eta), cfg)?;
        rows.push(ReportRow {
            parameter: eta,
            gap: sup_gap(&field, &limit, |_| true),
            tolerance: f64::INFINITY,
            pass: true,
            wall_time_ms: elapsed_ms(t),
        });
    }
    Ok(SweepReport {
        name: "sweep-eta-full".into(),
        parameter: "eta".into(),
        rows,
        checks: Vec::new(),
        notes: vec![format!("exploratory, no acceptance gate: n={} M={m} floor=1/M", a.n())],
    })
}

/// Convergence `V_r → V` on a compact set as `r ↓ 0`, with the ordering
/// `V ≤ V_{r'} ≤ V_r` (up to grid slack) for `r' < r`.
pub fn sweep_r(a: &PayoffMatrix, m: u32, rs: &[f64], compact: Compact, cfg: &SolveConfig) -> Result<SweepReport> {
    decreasing(rs, "r")?;
    let slack = grid_slack(m);
    let full = solve_target(Arc::new(BarycentricGrid::new(a.n(), m, 0.0)?), a, CostKind::Limit, cfg)?;
    let mut fields = Vec::new();
    let mut rows: Vec<ReportRow> = Vec::new();
    let mut checks = Vec::new();
    for &r in rs {
        let t = Instant::now();
        let grid = Arc::new(BarycentricGrid::new(a.n(), m, r)?);
        let field = solve_target(grid.clone(), a, CostKind::Limit, cfg)?;
        let gap = sup_gap(&field, &full, |node| compact.contains(&grid, node));
        let tolerance = rows.last().map_or(f64::INFINITY, |p| p.gap + slack);
        rows.push(ReportRow { parameter: r, gap, tolerance, pass: gap <= tolerance, wall_time_ms: elapsed_ms(t) });
        checks.push(CheckItem::at_most(format!("V <= V_r + 4/M (r={r})"), max_excess_on(&full, &field), slack));
        fields.push(field);
    }
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            // rs[j] < rs[i]: the larger domain has the smaller value.
            checks.push(CheckItem::at_most(
                format!("V_{} <= V_{} + 4/M", rs[j], rs[i]),
                max_excess_on(&fields[j], &fields[i]),
                slack,
            ));
        }
    }
    Ok(SweepReport {
        name: "sweep-r".into(),
        parameter: "r".into(),
        rows,
        checks,
        notes: vec![format!("n={} M={m} compact min_coord={}", a.n(), compact.min_coord)],
    })
}

/// `max (f - g)` over the nodes of `g`'s grid: for `f` on the larger domain
/// and `g` on the smaller one this measures `V_{r'} - V_r` on `X_r`.
fn max_excess_on(f: &ValueField, g: &ValueField) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for node in 0..g.grid().len() {
        let Some(other) = f.grid().index_of(g.grid().numerators(node)) else { continue };
        let (a, b) = (f.value(other), g.value(node));
        if a.is_finite() && b.is_finite() {
            worst = worst.max(a - b);
        }
    }
    worst
}

/// `|V^η_{r_η} - V|` on a compact set along a joint schedule `(η, r_η)`.
pub fn coupled_limit(
    a: &PayoffMatrix,
    m: u32,
    pairs: &[(f64, f64)],
    compact: Compact,
    cfg: &SolveConfig,
) -> Result<SweepReport> {
    let etas: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    decreasing(&etas, "eta")?;
    let full = solve_target(Arc::new(BarycentricGrid::new(a.n(), m, 0.0)?), a, CostKind::Limit, cfg)?;
    let mut gaps = Vec::new();
    let mut times = Vec::new();
    let mut checks = Vec::new();
    let mut prev_schedule = f64::INFINITY;
    for &(eta, r) in pairs {
        let t = Instant::now();
        let grid = Arc::new(BarycentricGrid::new(a.n(), m, r)?);
        let field = solve_target(grid.clone(), a, CostKind::Eta(eta), cfg)?;
        gaps.push(sup_gap(&field, &full, |node| compact.contains(&grid, node)));
        times.push(elapsed_ms(t));
        let schedule = (eta * r.ln()).abs();
        checks.push(CheckItem::at_most(format!("|eta ln r| nonincreasing (eta={eta}, r={r})"), schedule, prev_schedule));
        prev_schedule = schedule;
    }
    Ok(SweepReport {
        name: "coupled-limit".into(),
        parameter: "eta".into(),
        rows: trend_rows(&etas, &gaps, &times),
        checks,
        notes: vec![format!("n={} M={m} compact min_coord={}", a.n(), compact.min_coord)],
    })
}
