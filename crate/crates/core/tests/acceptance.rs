//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use logit_hj::closedform::{v_eta_1d, TwoActionGame};
use logit_hj::experiments::{
    barrier_check, blowup_check, blowup_points, corner_cost_check, delta_bar, eta_ceiling, grid_slack,
    inclusion_check, noncoercivity_probe, sample_outside_d, sweep_eta_restricted, sweep_r, BarrierParams, Compact,
    InclusionParams,
};
use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::{BarycentricGrid, SimplexPoint, TangentVector};
use logit_hj::hamiltonian::{h_eta, h_limit, CostKind, RaySolverConfig};
use logit_hj::mcsim::{estimate_exit_stats, trial_rng};
use logit_hj::solver::{
    bellman_ford, field_from_weights, reconstruct_path, ArcWeights, FieldKind, SolveConfig, ValueField,
};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn cfg() -> SolveConfig {
    SolveConfig::default()
}

/// `sup |H^η - H|` over random `(x, u) ∈ X_r × {|u|_1 ≤ 10}`.
fn hamiltonian_gap() -> Verdict {
    let t = Instant::now();
    let a = PayoffMatrix::identity(3);
    let r: f64 = 0.1;
    let mut rng = trial_rng(2024, 0);
    let mut detail = Vec::new();
    let mut violations = 0;
    for eta in [0.2, 0.1, 0.05] {
        let bound = eta * (3f64.ln() - r.ln());
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            let w: Vec<f64> = (0..3).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
            let total: f64 = w.iter().sum();
            let x = SimplexPoint::new(w.iter().map(|v| r + (1.0 - 3.0 * r) * v / total).collect()).unwrap();
            let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = raw.iter().sum::<f64>() / 3.0;
            let dir: Vec<f64> = raw.iter().map(|v| v - mean).collect();
            let l1: f64 = dir.iter().map(|v| v.abs()).sum();
            let len = 10.0 * rng.gen::<f64>();
            let u = TangentVector::new(dir.iter().map(|v| v * len / l1.max(1e-300)).collect()).unwrap();
            let gap = (h_eta(&a, eta, &x, &u).unwrap() - h_limit(&a, &x, &u)).abs();
            worst = worst.max(gap);
            if gap > bound {
                violations += 1;
            }
        }
        detail.push(format!("eta={eta}: max {worst:.4} <= {bound:.4}"));
    }
    let el = t.elapsed();
    verdict(violations == 0 && within(el, 5.0), format!("{}; {violations} violations; {:.2}s", detail.join(", "), el.as_secs_f64()))
}

/// `(x_1 - 1/2)_+^2`, from integrating the cost `2s - 1` of lowering `x_1`
/// by trapezoid sums.
fn oracle_v_identity(x1: f64) -> f64 {
    if x1 <= 0.5 {
        return 0.0;
    }
    let steps = 4000;
    let h = (x1 - 0.5) / steps as f64;
    let f = |s: f64| 2.0 * s - 1.0;
    (0..steps).map(|k| 0.5 * h * (f(0.5 + k as f64 * h) + f(0.5 + (k + 1) as f64 * h))).sum()
}

fn two_action_limit() -> Verdict {
    let t = Instant::now();
    let a = PayoffMatrix::identity(2);
    let grid = Arc::new(BarycentricGrid::new(2, 200, 0.0).unwrap());
    let v = logit_hj::solver::solve_target(grid.clone(), &a, CostKind::Limit, &cfg()).unwrap();
    let at_e1 = (v.value(grid.corner(0)) - 0.25).abs();
    let worst = (0..grid.len()).map(|i| (v.value(i) - oracle_v_identity(grid.coords(i)[0])).abs()).fold(0.0, f64::max);
    let el = t.elapsed();
    verdict(
        at_e1 <= 0.01 && worst <= 0.01 && within(el, 1.0),
        format!("|V(e1)-0.25| = {at_e1:.2e}, max node gap {worst:.2e}; {:.3}s", el.as_secs_f64()),
    )
}

fn two_action_eta() -> Verdict {
    let t = Instant::now();
    let a = PayoffMatrix::identity(2);
    let g = TwoActionGame::new(1.0, 1.0).unwrap();
    let m = 200;
    let grid = Arc::new(BarycentricGrid::new(2, m, 1.0 / m as f64).unwrap());
    let mut detail = Vec::new();
    let mut pass = true;
    for eta in [0.2, 0.1] {
        let v = logit_hj::solver::solve_target(grid.clone(), &a, CostKind::Eta(eta), &cfg()).unwrap();
        let worst = (0..grid.len())
            .map(|i| (v.value(i) - v_eta_1d(&g, eta, grid.coords(i)[0]).unwrap()).abs())
            .fold(0.0, f64::max);
        pass &= worst <= 0.02;
        detail.push(format!("eta={eta}: max node gap {worst:.2e}"));
    }
    let el = t.elapsed();
    verdict(pass && within(el, 30.0), format!("{}; {:.2}s", detail.join(", "), el.as_secs_f64()))
}

fn eta_trend() -> Verdict {
    let t = Instant::now();
    let a = PayoffMatrix::identity(3);
    let m = 60;
    let rep = sweep_eta_restricted(&a, 0.1, m, &[0.4, 0.2, 0.1, 0.05], &cfg()).unwrap();
    let gaps = rep.gaps();
    let last = *gaps.last().unwrap();
    let bound = 3.0 * grid_slack(m);
    let el = t.elapsed();
    verdict(
        rep.pass() && last <= bound && within(el, 600.0),
        format!(
            "gaps {}; final {last:.4} <= {bound:.4}; {:.2}s",
            gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>().join(" > "),
            el.as_secs_f64()
        ),
    )
}

fn r_monotonicity() -> Verdict {
    let a = PayoffMatrix::identity(3);
    let rep = sweep_r(&a, 120, &[0.2, 0.1, 0.05], Compact { min_coord: 0.2 }, &cfg()).unwrap();
    let pairs: Vec<_> = rep.checks.iter().filter(|c| c.label.starts_with("V_")).collect();
    let violations = pairs.iter().filter(|c| !c.pass).count();
    let worst = pairs.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    verdict(
        pairs.len() == 3 && violations == 0,
        format!("{} pairs, max V_r' - V_r = {worst:.2e} (slack {:.4}), {violations} violations", pairs.len(), grid_slack(120)),
    )
}

fn regime_eta(a: &PayoffMatrix, v: &ValueField, r: f64, theta: f64, delta: f64) -> f64 {
    let nodes = sample_outside_d(a, v, delta, usize::MAX);
    eta_ceiling(r, theta, delta_bar(a, v.grid(), &nodes))
}

fn barrier() -> Verdict {
    let a = PayoffMatrix::identity(3);
    let (r, theta, delta) = (0.1, 0.9, 0.05);
    let solve = |m: u32, cost| {
        logit_hj::solver::solve_target(Arc::new(BarycentricGrid::new(3, m, r).unwrap()), &a, cost, &cfg()).unwrap()
    };
    // A finer grid supplies enough sample points for the inclusion test.
    let v_fine = solve(240, CostKind::Limit);
    let v_r = solve(120, CostKind::Limit);
    let eta = regime_eta(&a, &v_fine, r, theta, delta).min(regime_eta(&a, &v_r, r, theta, delta));
    let inc = inclusion_check(&a, &v_fine, &InclusionParams { r, eta, theta, delta, samples: 500 }).unwrap();
    let in_regime = inc.notes.iter().any(|n| n == "regime holds");
    let v_eta = solve(120, CostKind::Eta(eta));
    let bar = barrier_check(&v_r, &v_eta, &BarrierParams { theta, delta }).unwrap();
    verdict(
        inc.items.len() == 500 && in_regime && inc.pass() && bar.pass(),
        format!(
            "eta={eta:.5}; inclusion {}/{} points; barrier {} nodes, {} violations",
            inc.items.len() - inc.failures().count(),
            inc.items.len(),
            bar.items.len(),
            bar.failures().count()
        ),
    )
}

fn blowup() -> Verdict {
    let a = PayoffMatrix::identity(3);
    let points = blowup_points(3, 25, &[0.2, 0.1, 0.05, 0.02], 11).unwrap();
    let mut violations = 0;
    let mut items = 0;
    for eta in [0.2, 0.1] {
        let rep = blowup_check(&a, eta, &points, &RaySolverConfig::default()).unwrap();
        items += rep.items.len();
        violations += rep.failures().count();
    }
    verdict(points.len() == 100 && violations == 0, format!("{} points, {items} pair checks, {violations} violations", points.len()))
}

fn corner_cost() -> Verdict {
    let a = PayoffMatrix::identity(3);
    let rep = corner_cost_check(&a, 0.1, &[0.2, 0.1, 0.05], 100, &cfg()).unwrap();
    let parts: Vec<String> = rep.items.iter().map(|i| format!("{:.4}<={:.4}", i.value, i.bound)).collect();
    verdict(rep.pass(), parts.join(", "))
}

fn noncoercivity() -> Verdict {
    let a = PayoffMatrix::identity(3);
    let mut items = 0;
    let mut fails = 0;
    for eta in [0.2, 0.1, 0.05] {
        let rep = noncoercivity_probe(&a, eta, &[1.0, 10.0, 100.0, 1000.0]).unwrap();
        items += rep.items.len();
        fails += rep.failures().count();
    }
    verdict(fails == 0, format!("{items} sandwich/limit checks, {fails} violations"))
}

fn solver_integrity() -> Verdict {
    let mut grids = 0;
    let mut bf_gap = 0.0_f64;
    let mut path_excess = f64::NEG_INFINITY;
    let mut min_weight = f64::INFINITY;
    let cases: Vec<(usize, u32, f64, CostKind)> = vec![
        (2, 20, 0.0, CostKind::Limit),
        (2, 200, 0.0, CostKind::Limit),
        (2, 200, 0.005, CostKind::Eta(0.1)),
        (3, 10, 0.0, CostKind::Limit),
        (3, 30, 0.0, CostKind::Limit),
        (3, 30, 0.1, CostKind::Eta(0.2)),
        (3, 20, 0.05, CostKind::Eta(0.05)),
        (4, 10, 0.0, CostKind::Limit),
        (4, 12, 1.0 / 12.0, CostKind::Eta(0.1)),
    ];
    let payoffs = |n: usize| {
        let mut v = vec![PayoffMatrix::identity(n)];
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 + 0.5 * i as f64 } else { 0.1 * j as f64 }).collect()).collect();
        v.push(PayoffMatrix::coordination(rows).unwrap());
        v
    };
    for (n, m, r, cost) in cases {
        for a in payoffs(n) {
            let grid = Arc::new(BarycentricGrid::new(n, m, r).unwrap());
            assert!(grid.len() <= 500);
            let w = Arc::new(ArcWeights::compute(grid.clone(), &a, cost, &cfg()).unwrap());
            min_weight = min_weight.min(w.min_weight());
            let target = logit_hj::solver::target_seeds(&grid, &a, &logit_hj::game::Target::LeaveFirst);
            for (kind, seeds) in [(FieldKind::Target, target), (FieldKind::Source, vec![grid.corner(0)])] {
                let field = field_from_weights(w.clone(), &seeds, kind).unwrap();
                let bf = bellman_ford(&w, &seeds, kind);
                for (p, q) in field.values().iter().zip(&bf) {
                    if p.is_finite() || q.is_finite() {
                        bf_gap = bf_gap.max((p - q).abs());
                    }
                }
                if kind == FieldKind::Target {
                    for node in 0..grid.len() {
                        let v = field.value(node);
                        if v.is_finite() {
                            let path = reconstruct_path(&field, node).unwrap();
                            path_excess = path_excess.max((path.total - v).abs() - 1e-6 * (1.0 + v));
                        }
                    }
                }
                grids += 1;
            }
        }
    }
    verdict(
        bf_gap <= 1e-12 && path_excess <= 0.0 && min_weight >= -1e-12,
        format!("{grids} fields; max |Dijkstra-BF| {bf_gap:.1e}; path excess {path_excess:.1e}; min weight {min_weight:.2e}"),
    )
}

fn properties() -> Verdict {
    let results = common::run_all(common::CASES);
    let failed: Vec<String> =
        results.iter().filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}"))).collect();
    let names: Vec<&str> = results.iter().map(|(n, _)| *n).collect();
    verdict(failed.is_empty(), if failed.is_empty() { format!("{} x {} cases", names.join(", "), common::CASES) } else { failed.join("; ") })
}

fn hitting_trend() -> Verdict {
    let a = PayoffMatrix::identity(2);
    let run = || estimate_exit_stats(&a, &[20, 40, 80], 0.3, 200, 42, u64::MAX).unwrap();
    let first = run();
    let again = run();
    let medians: Vec<f64> = first.iter().map(|s| s.median.unwrap_or(f64::NAN)).collect();
    let increasing = medians.windows(2).all(|w| w[0] < w[1]);
    let bytes = |s: &Vec<logit_hj::mcsim::ExitStats>| serde_json::to_vec(s).unwrap();
    let same = bytes(&first) == bytes(&again);
    verdict(
        increasing && same,
        format!(
            "medians {}; reproducible: {same}",
            medians.iter().map(|m| format!("{m:.4e}")).collect::<Vec<_>>().join(" < ")
        ),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("hamiltonian gap bound", hamiltonian_gap),
        ("two-action limit solver", two_action_limit),
        ("two-action eta solver", two_action_eta),
        ("eta -> 0 trend on X_r", eta_trend),
        ("r -> 0 monotonicity", r_monotonicity),
        ("inclusion and barrier", barrier),
        ("running-cost blow-up", blowup),
        ("corner cost bound", corner_cost),
        ("noncoercivity at e1", noncoercivity),
        ("solver integrity", solver_integrity),
        ("property suites", properties),
        ("hitting-time trend", hitting_trend),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("[{:>2}] {} {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
