use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{grid_slack, CheckItem, CheckReport};
use crate::error::{invalid, Result};
use crate::game::{best_response_region, PayoffMatrix};
use crate::geometry::{project_to_tangent, BarycentricGrid, SimplexPoint, TangentVector};
use crate::hamiltonian::{
    h_eta, legendre_l_eta, support_cost_eta, zero_box, CostKind, EdgeCostEvaluator, RaySolverConfig,
};
use crate::mcsim::trial_rng;
use crate::solver::{field_from_weights, lipschitz_estimate, solve_target, ArcWeights, FieldKind, SolveConfig, ValueField};

/// Numerical zero for Hamiltonian values at co-states that are exactly zero
/// in exact arithmetic.
const H_TOL: f64 = 1e-12;

fn label(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|c| format!("{c:.6}")).collect();
    format!("({})", parts.join(" "))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionParams {
    pub r: f64,
    pub eta: f64,
    pub theta: f64,
    pub delta: f64,
    pub samples: usize,
}

/// Up to `count` evenly strided nodes of `B^1` where the field exceeds `delta`.
pub fn sample_outside_d(a: &PayoffMatrix, field: &ValueField, delta: f64, count: usize) -> Vec<usize> {
    let grid = field.grid();
    let candidates: Vec<usize> = (0..grid.len())
        .filter(|&i| field.value(i) > delta && best_response_region(a, &grid.coords(i), 0.0).contains(0))
        .collect();
    if candidates.len() <= count {
        return candidates;
    }
    (0..count).map(|k| candidates[k * candidates.len() / count]).collect()
}

/// `min_x min_{j≠1} A^{1-j}x` over the given nodes.
pub fn delta_bar(a: &PayoffMatrix, grid: &BarycentricGrid, nodes: &[usize]) -> f64 {
    nodes
        .iter()
        .flat_map(|&i| {
            let x = grid.coords(i);
            (1..a.n()).map(move |j| a.advantage(0, j, &x))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest `η` with `η(ln 2 - ln r) ≤ (1 - θ) δ̄`.
pub fn eta_ceiling(r: f64, theta: f64, delta_bar: f64) -> f64 {
    (1.0 - theta) * delta_bar / (2f64.ln() - r.ln())
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.5 && theta < 1.0 {
        Ok(())
    } else {
        invalid(format!("theta = {theta} must lie in (1/2, 1)"))
    }
}

/// `θN(x) ⊂ N^η(x)`: `H^η(x, u) ≤ 0` at every vertex `u` of the scaled box,
/// at sampled `x ∈ B^1 ∩ X_r` with `V_r(x) > δ`. Convexity of `H^η` extends
/// the vertex test to the box. Points are sampled even when the sufficient
/// condition `η(ln 2 - ln r) ≤ (1-θ)δ̄` fails; failures there are labelled
/// and do not fail the report.
pub fn inclusion_check(a: &PayoffMatrix, v_r: &ValueField, p: &InclusionParams) -> Result<CheckReport> {
    check_theta(p.theta)?;
    let grid = v_r.grid();
    let nodes = sample_outside_d(a, v_r, p.delta, p.samples);
    if nodes.is_empty() {
        return invalid("no grid node of B^1 has a value above delta");
    }
    let dbar = delta_bar(a, grid, &nodes);
    let lhs = p.eta * (2f64.ln() - p.r.ln());
    let in_regime = lhs <= (1.0 - p.theta) * dbar;
    let mut items = Vec::with_capacity(nodes.len());
    for &node in &nodes {
        let x = grid.point(node);
        let worst = zero_box(a, &x)
            .scaled_vertices(p.theta)
            .iter()
            .map(|u| h_eta(a, p.eta, &x, u))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut item = CheckItem::at_most(format!("max H^eta on theta N(x) at x={}", label(x.coords())), worst, H_TOL);
        if !in_regime && !item.pass {
            item.label.push_str(" [outside regime]");
            item.pass = true;
        }
        items.push(item);
    }
    Ok(CheckReport {
        name: "check-inclusion".into(),
        items,
        notes: vec![
            format!("samples={} delta_bar={dbar:.12} eta*(ln2-ln r)={lhs:.12} (1-theta)*delta_bar={:.12}", nodes.len(), (1.0 - p.theta) * dbar),
            format!("regime {}", if in_regime { "holds" } else { "violated: outside regime" }),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub theta: f64,
    pub delta: f64,
}

/// `V^η_r ≥ φ^θ - 4/M` at every node, with `φ^θ = θ(V_r - δ)` where
/// `V_r > δ` and `0` elsewhere.
pub fn barrier_check(v_r: &ValueField, v_eta_r: &ValueField, p: &BarrierParams) -> Result<CheckReport> {
    check_theta(p.theta)?;
    let grid = v_r.grid();
    let slack = grid_slack(grid.denominator());
    let mut items = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let k = grid.numerators(node);
        let Some(other) = v_eta_r.grid().index_of(k) else {
            return invalid("the two fields live on different grids");
        };
        let vr = v_r.value(node);
        let phi = if vr > p.delta { p.theta * (vr - p.delta) } else { 0.0 };
        items.push(CheckItem::at_least(
            format!("V^eta_r >= phi - 4/M at x={}", label(&grid.coords(node))),
            v_eta_r.value(other),
            phi - slack,
        ));
    }
    Ok(CheckReport {
        name: "check-barrier".into(),
        items,
        notes: vec![format!("theta={} delta={} slack={slack}", p.theta, p.delta)],
    })
}

/// `per_level` points for each level `c`, with one coordinate equal to `c`
/// (cycling through the actions) and the others drawn at least `c`.
pub fn blowup_points(n: usize, per_level: usize, levels: &[f64], seed: u64) -> Result<Vec<SimplexPoint>> {
    let mut rng = trial_rng(seed, 0);
    let mut out = Vec::new();
    for &c in levels {
        if !(c > 0.0 && c * n as f64 <= 1.0) {
            return invalid(format!("level {c} is not attainable with {n} actions"));
        }
        for k in 0..per_level {
            let low = k % n;
            let w: Vec<f64> = (0..n).map(|i| if i == low { 0.0 } else { -rng.gen::<f64>().max(1e-300).ln() }).collect();
            let total: f64 = w.iter().sum();
            let spare = 1.0 - n as f64 * c;
            let coords: Vec<f64> = w.iter().map(|wi| c + spare * wi / total).collect();
            out.push(SimplexPoint::from_weights(&coords)?);
        }
    }
    Ok(out)
}

/// `L^η(x, e_j - e_i) ≥ -η ln x_i - η ln 2` (minus `1e-6`) for all pairs.
pub fn blowup_check(a: &PayoffMatrix, eta: f64, points: &[SimplexPoint], cfg: &RaySolverConfig) -> Result<CheckReport> {
    let n = a.n();
    let mut items = Vec::new();
    for x in points {
        if !x.is_interior() {
            return invalid("blow-up points must be interior");
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let l = legendre_l_eta(a, eta, x, &TangentVector::swap(n, i, j), cfg)?;
                let bound = -eta * x.coords()[i].ln() - eta * 2f64.ln();
                items.push(CheckItem::at_least(format!("L^eta(x={}, e{}-e{})", label(x.coords()), j + 1, i + 1), l, bound - 1e-6));
            }
        }
    }
    Ok(CheckReport { name: "check-blowup".into(), items, notes: vec![format!("eta={eta} slack=1e-6")] })
}

/// `max A^1 x` over `B^1`, by enumerating the vertices of the polytope
/// `{x ∈ X : A^1 x ≥ A^j x for all j}`.
pub fn max_first_payoff_on_b1(a: &PayoffMatrix) -> f64 {
    let n = a.n();
    // Constraint rows c·x ≥ 0: coordinates, then advantages of action 1.
    let mut rows: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()).collect();
    for j in 1..n {
        rows.push((0..n).map(|i| a.entry(0, i) - a.entry(j, i)).collect());
    }
    let mut best = f64::NEG_INFINITY;
    let mut pick = Vec::new();
    choose(rows.len(), n - 1, 0, &mut pick, &mut |active| {
        let mut m = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (r, &c) in active.iter().enumerate() {
            for i in 0..n {
                m[(r, i)] = rows[c][i];
            }
        }
        for i in 0..n {
            m[(n - 1, i)] = 1.0;
        }
        rhs[n - 1] = 1.0;
        let Some(x) = m.lu().solve(&rhs) else { return };
        if rows.iter().all(|row| row.iter().zip(x.iter()).map(|(c, v)| c * v).sum::<f64>() >= -1e-12) {
            let x: Vec<f64> = x.iter().copied().collect();
            best = best.max(a.payoff_vector(&x)[0]);
        }
    });
    best
}

fn choose(total: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for c in start..total {
        pick.push(c);
        choose(total, k, c + 1, pick, f);
        pick.pop();
    }
}

/// Explicit corner-cost bound
/// `(n-1) r max_{B^1} A^1x + η r (n-1)(ln n - ln(1 - (n-1) r))`.
pub fn corner_cost_bound(a: &PayoffMatrix, eta: f64, r: f64) -> f64 {
    let n1 = (a.n() - 1) as f64;
    n1 * r * max_first_payoff_on_b1(a) + eta * r * n1 * ((a.n() as f64).ln() - (1.0 - n1 * r).ln())
}

/// Cost of moving from `e_1` to `y_1(r)` under the η-cost, against the
/// explicit bound plus `4/M`. The grid path starts at the interior node
/// next to `e_1`; the first cell is charged its explicit bound.
pub fn corner_cost_check(a: &PayoffMatrix, eta: f64, rs: &[f64], m: u32, cfg: &SolveConfig) -> Result<CheckReport> {
    let n = a.n();
    let grid = Arc::new(BarycentricGrid::new(n, m, 0.0)?);
    let mut start = vec![1u32; n];
    start[0] = m - (n as u32 - 1);
    let start = grid.index_of(&start).ok_or_else(|| crate::Error::InvalidInput("M too small".into()))?;
    let open = SolveConfig { allow_boundary: true, ..*cfg };
    let weights = Arc::new(ArcWeights::compute(grid.clone(), a, CostKind::Eta(eta), &open)?);
    let field = field_from_weights(weights, &[start], FieldKind::Source)?;
    let first_cell = corner_cost_bound(a, eta, 1.0 / m as f64);
    let slack = grid_slack(m);
    let mut items = Vec::new();
    let mut ratios = Vec::new();
    for &r in rs {
        let y = crate::geometry::restricted_vertices(n, r)?;
        let target = grid.nearest(&y[0]);
        if grid.coords(target).iter().zip(y[0].coords()).any(|(g, t)| (g - t).abs() > 1e-9) {
            return invalid(format!("y_1({r}) is not a lattice point for M={m}"));
        }
        let cost = field.value(target) + first_cell;
        items.push(CheckItem::at_most(format!("c^eta(e1, y1({r}))"), cost, corner_cost_bound(a, eta, r) + slack));
        ratios.push(cost / r);
    }
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    items.push(CheckItem::at_most("max/min of cost/r across r", hi / lo, 2.0));
    Ok(CheckReport {
        name: "check-corner".into(),
        items,
        notes: vec![
            format!("eta={eta} M={m} first-cell bound={first_cell:.12}"),
            format!("cost/r: {}", ratios.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")),
        ],
    })
}

/// `-η ln n < H^η(e_1, s ū) < 0` for `ū = (0, -1, …, -1)`, and agreement
/// with the `s → ∞` limit `A^1e_1 - η ln Σ_k e^{A^k e_1/η}` at the largest `s`.
pub fn noncoercivity_probe(a: &PayoffMatrix, eta: f64, s_list: &[f64]) -> Result<CheckReport> {
    let n = a.n();
    let s_max = s_list.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(s_max >= 100.0) {
        return invalid("the largest s must be at least 100");
    }
    let e1 = SimplexPoint::vertex(n, 0);
    let pi = a.payoff_vector(e1.coords());
    let max = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max / eta + pi.iter().map(|p| ((p - max) / eta).exp()).sum::<f64>().ln();
    let limit = pi[0] - eta * lse;
    let floor = -eta * (n as f64).ln();
    let mut items = Vec::new();
    let mut at_max = f64::NAN;
    for &s in s_list {
        let ubar: Vec<f64> = (0..n).map(|j| if j == 0 { 0.0 } else { -s }).collect();
        let h = h_eta(a, eta, &e1, &project_to_tangent(&ubar))?;
        let mut lower = CheckItem::at_least(format!("H^eta(e1, {s} ubar) > -eta ln n"), h, floor);
        lower.pass = h > floor;
        let mut upper = CheckItem::at_most(format!("H^eta(e1, {s} ubar) < 0"), h, 0.0);
        upper.pass = h < 0.0;
        items.push(lower);
        items.push(upper);
        if s == s_max {
            at_max = h;
        }
    }
    items.push(CheckItem::at_most(format!("|H^eta(e1, {s_max} ubar) - limit|"), (at_max - limit).abs(), 1e-9));
    Ok(CheckReport {
        name: "probe-noncoercive".into(),
        items,
        notes: vec![format!("eta={eta} limit={limit:.16e} floor={floor:.16e}")],
    })
}

/// Lipschitz estimates of `V^η_r` across `η`: each below the coercivity
/// constant `C(r) = (n-1)/2 (max spread + η_max(ln n - ln r))` plus grid
/// slack, and all within a factor 2 of each other.
pub fn lipschitz_uniformity_check(
    a: &PayoffMatrix,
    r: f64,
    m: u32,
    etas: &[f64],
    cfg: &SolveConfig,
) -> Result<CheckReport> {
    if etas.is_empty() {
        return invalid("eta list is empty");
    }
    let n = a.n() as f64;
    let eta_max = etas.iter().copied().fold(0.0, f64::max);
    let c_r = (n - 1.0) / 2.0 * (a.max_payoff_spread() + eta_max * (n.ln() - r.ln()));
    let grid = Arc::new(BarycentricGrid::new(a.n(), m, r)?);
    let mut items = Vec::new();
    let mut est = Vec::new();
    for &eta in etas {
        let field = solve_target(grid.clone(), a, CostKind::Eta(eta), cfg)?;
        let l = lipschitz_estimate(&field);
        items.push(CheckItem::at_most(format!("lipschitz(V^eta_r), eta={eta}"), l, c_r + grid_slack(m)));
        est.push(l);
    }
    let hi = est.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = est.iter().copied().fold(f64::INFINITY, f64::min);
    items.push(CheckItem::at_most("max/min lipschitz across eta", hi / lo, 2.0));
    Ok(CheckReport {
        name: "check-lipschitz".into(),
        items,
        notes: vec![format!("r={r} M={m} C(r)={c_r:.12}")],
    })
}

/// Splits a sum-zero direction into nonnegative swap amounts by moving mass
/// from negative to positive coordinates in index order.
fn swap_decomposition(d: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut neg: Vec<(usize, f64)> = d.iter().enumerate().filter(|(_, v)| **v < 0.0).map(|(i, v)| (i, -v)).collect();
    let mut pos: Vec<(usize, f64)> = d.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, v)| (i, *v)).collect();
    let (mut a, mut b) = (0, 0);
    let mut out = Vec::new();
    while a < neg.len() && b < pos.len() {
        let t = neg[a].1.min(pos[b].1);
        out.push((neg[a].0, pos[b].0, t));
        neg[a].1 -= t;
        pos[b].1 -= t;
        if neg[a].1 <= 1e-15 {
            a += 1;
        }
        if pos[b].1 <= 1e-15 {
            b += 1;
        }
    }
    out
}

/// Local anisotropy of the swap move set: for each point and sampled unit
/// direction `d`, the ratio of the swap-decomposed cost to `σ^η(x, d)`.
/// Subadditivity forces every ratio to be at least 1; the maximum measures
/// how much the grid metric can overestimate.
pub fn swap_anisotropy(
    a: &PayoffMatrix,
    eta: f64,
    points: &[SimplexPoint],
    directions: usize,
    cfg: &RaySolverConfig,
) -> Result<CheckReport> {
    let eval = EdgeCostEvaluator::new(a.clone(), CostKind::Eta(eta), *cfg)?;
    let dirs = crate::hamiltonian::sample_directions(a.n(), directions)?;
    let mut items = Vec::new();
    let mut worst = 1.0_f64;
    for x in points {
        for d in &dirs {
            let delta = TangentVector::new(d.clone())?;
            let direct = eval.cost(x, &delta)?;
            let mut via_swaps = 0.0;
            for (i, j, t) in swap_decomposition(d) {
                via_swaps += support_cost_eta(a, eta, x, &TangentVector::swap(a.n(), i, j).scaled(t), cfg)?;
            }
            if direct <= 1e-12 {
                continue;
            }
            let ratio = via_swaps / direct;
            worst = worst.max(ratio);
            items.push(CheckItem::at_least(format!("swap/direct at x={} d={}", label(x.coords()), label(d)), ratio, 1.0 - 1e-8));
        }
    }
    Ok(CheckReport {
        name: "swap-anisotropy".into(),
        items,
        notes: vec![format!("eta={eta} max ratio={worst:.9}")],
    })
}

/// Boundary samples of `N(x)` and `N^η(x)` in the orthonormal coordinates
/// of `Y` (one coordinate for `n = 2`, two for `n = 3`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub limit: Vec<Vec<f64>>,
    pub eta: Vec<Vec<f64>>,
}

pub fn levelset_polygon(a: &PayoffMatrix, eta: f64, x: &SimplexPoint, samples: usize, cfg: &RaySolverConfig) -> Result<LevelSet> {
    let n = a.n();
    if n > 3 {
        return invalid("level sets are only drawn for n <= 3");
    }
    let dirs = crate::hamiltonian::sample_directions(n, samples)?;
    let basis: Vec<Vec<f64>> = crate::hamiltonian::sample_directions(n, 4)?.into_iter().take(n - 1).collect();
    let coords = |u: &[f64]| -> Vec<f64> { basis.iter().map(|b| b.iter().zip(u).map(|(p, q)| p * q).sum()).collect() };
    let b = zero_box(a, x);
    let mut corners = b.scaled_vertices(1.0);
    if n == 3 {
        // Walk the square in cyclic order.
        corners.swap(2, 3);
    }
    let limit = corners.iter().map(|u| coords(u.comps())).collect();
    let mut eta_pts = Vec::with_capacity(dirs.len());
    for d in dirs {
        let rho = crate::hamiltonian::sublevel_ray_length(a, eta, x, &TangentVector::new(d.clone())?, cfg)?;
        // u = 0 lies on the boundary, so a run of directions has length 0.
        // Keep one origin per run.
        let at_origin = |p: &Vec<f64>| p.iter().all(|c| *c == 0.0);
        if rho == 0.0 && eta_pts.last().is_some_and(at_origin) {
            continue;
        }
        if rho.is_finite() {
            let u: Vec<f64> = d.iter().map(|c| c * rho).collect();
            eta_pts.push(coords(&u));
        }
    }
    Ok(LevelSet { limit, eta: eta_pts })
}
