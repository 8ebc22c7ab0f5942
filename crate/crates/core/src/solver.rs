//! Value functions of the target and source problems as multi-source
//! shortest-path distances on a [`BarycentricGrid`].
//!
//! The arc from node `a` to `b = a + Δ` costs `σ(m, Δ)` where `m` is the
//! segment midpoint and `σ` the support function of the zero sublevel set of
//! the chosen Hamiltonian. Target values run Dijkstra backwards from `Z`;
//! source values run it forwards from `X_0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{PayoffMatrix, Target};
use crate::geometry::BarycentricGrid;
use crate::hamiltonian::{support_cost_eta, support_cost_limit, CostKind, RaySolverConfig};

/// Solver settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct SolveConfig {
    pub ray: RaySolverConfig,
    /// Permit η-costs on grids touching `∂X`. Arcs whose midpoint lies on
    /// the boundary then cost `+∞`. Exploratory only.
    pub allow_boundary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Target,
    Source,
}

/// Edge weights of every arc `(node, move)` of a grid.
#[derive(Clone, Debug)]
pub struct ArcWeights {
    grid: Arc<BarycentricGrid>,
    cost: CostKind,
    weights: Vec<f64>,
}

impl ArcWeights {
    /// Evaluates all arc costs. Arcs leaving the grid get `+∞`.
    pub fn compute(grid: Arc<BarycentricGrid>, a: &PayoffMatrix, cost: CostKind, cfg: &SolveConfig) -> Result<Self> {
        if a.n() != grid.n() {
            return invalid(format!("payoff matrix has {} actions, grid has {}", a.n(), grid.n()));
        }
        cfg.ray.validate()?;
        if let CostKind::Eta(_) = cost {
            if grid.floor() == 0 && !cfg.allow_boundary {
                return invalid("eta costs need a restricted grid (r > 0)");
            }
        }
        let moves = grid.move_count();
        let per_node: Vec<Result<Vec<f64>>> = (0..grid.len())
            .into_par_iter()
            .map(|node| {
                (0..moves)
                    .map(|mv| {
                        if grid.step(node, mv).is_none() {
                            return Ok(f64::INFINITY);
                        }
                        let mid = grid.midpoint(node, mv);
                        let delta = grid.displacement(mv);
                        let w = match cost {
                            CostKind::Limit => support_cost_limit(a, &mid, &delta),
                            CostKind::Eta(_) if !mid.is_interior() => f64::INFINITY,
                            CostKind::Eta(eta) => support_cost_eta(a, eta, &mid, &delta, &cfg.ray)?,
                        };
                        if w < -1e-12 || w.is_nan() {
                            return Err(Error::NumericalFailure(format!("arc cost {w} at node {node}, move {mv}")));
                        }
                        Ok(w.max(0.0))
                    })
                    .collect()
            })
            .collect();
        let mut weights = Vec::with_capacity(grid.len() * moves);
        for row in per_node {
            weights.extend(row?);
        }
        Ok(ArcWeights { grid, cost, weights })
    }

    pub fn grid(&self) -> &Arc<BarycentricGrid> {
        &self.grid
    }

    pub fn cost_kind(&self) -> CostKind {
        self.cost
    }

    /// Cost of the arc from `node` along move `mv`.
    pub fn weight(&self, node: usize, mv: usize) -> f64 {
        self.weights[node * self.grid.move_count() + mv]
    }

    /// Smallest weight over existing arcs.
    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A node-indexed value function.
#[derive(Clone, Debug)]
pub struct ValueField {
    weights: Arc<ArcWeights>,
    values: Vec<f64>,
    kind: FieldKind,
    seeds: Vec<usize>,
    rank: Vec<u32>,
}

const UNSETTLED: u32 = u32::MAX;

impl ValueField {
    pub fn grid(&self) -> &BarycentricGrid {
        &self.weights.grid
    }

    pub fn weights(&self) -> &Arc<ArcWeights> {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn cost_kind(&self) -> CostKind {
        self.weights.cost
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn is_seed(&self, node: usize) -> bool {
        self.seeds.binary_search(&node).is_ok()
    }

    /// Largest finite value.
    pub fn max_finite(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
    }

    /// Value at the node nearest to `x`.
    pub fn value_near(&self, x: &crate::geometry::SimplexPoint) -> f64 {
        self.values[self.grid().nearest(x)]
    }
}

/// Grid nodes in `Z` (or another target set).
pub fn target_seeds(grid: &BarycentricGrid, a: &PayoffMatrix, target: &Target) -> Vec<usize> {
    (0..grid.len()).filter(|&i| target.contains(a, grid.numerators(i))).collect()
}

/// `V`: minimal cost of reaching `Z` from each node.
pub fn solve_target(grid: Arc<BarycentricGrid>, a: &PayoffMatrix, cost: CostKind, cfg: &SolveConfig) -> Result<ValueField> {
    solve_target_set(grid, a, &Target::LeaveFirst, cost, cfg)
}

/// Target problem for an arbitrary seed predicate.
pub fn solve_target_set(
    grid: Arc<BarycentricGrid>,
    a: &PayoffMatrix,
    target: &Target,
    cost: CostKind,
    cfg: &SolveConfig,
) -> Result<ValueField> {
    let seeds = target_seeds(&grid, a, target);
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    let weights = Arc::new(ArcWeights::compute(grid, a, cost, cfg)?);
    field_from_weights(weights, &seeds, FieldKind::Target)
}

/// `W`: minimal cost of reaching each node from `X_0`.
pub fn solve_source(
    grid: Arc<BarycentricGrid>,
    a: &PayoffMatrix,
    x0: &[usize],
    cost: CostKind,
    cfg: &SolveConfig,
) -> Result<ValueField> {
    let weights = Arc::new(ArcWeights::compute(grid, a, cost, cfg)?);
    field_from_weights(weights, x0, FieldKind::Source)
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed for a min-heap; ties go to the lower node index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra on precomputed weights.
pub fn field_from_weights(weights: Arc<ArcWeights>, seeds: &[usize], kind: FieldKind) -> Result<ValueField> {
    let grid = weights.grid.clone();
    let mut seeds: Vec<usize> = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= grid.len()) {
        return invalid(format!("seed node {bad} is not on the grid"));
    }
    let moves = grid.move_count();
    let mut values = vec![f64::INFINITY; grid.len()];
    let mut rank = vec![UNSETTLED; grid.len()];
    let mut heap = BinaryHeap::new();
    for &s in &seeds {
        values[s] = 0.0;
        heap.push(Entry(0.0, s));
    }
    let mut settled = 0u32;
    while let Some(Entry(d, node)) = heap.pop() {
        if rank[node] != UNSETTLED || d > values[node] {
            continue;
        }
        rank[node] = settled;
        settled += 1;
        for mv in 0..moves {
            let (next, w) = match kind {
                FieldKind::Source => match grid.step(node, mv) {
                    Some(b) => (b, weights.weight(node, mv)),
                    None => continue,
                },
                // Arc next -> node uses move mv from next.
                FieldKind::Target => match grid.step(node, grid.opposite(mv)) {
                    Some(prev) => (prev, weights.weight(prev, mv)),
                    None => continue,
                },
            };
            if rank[next] != UNSETTLED {
                continue;
            }
            let cand = d + w;
            if cand < values[next] {
                values[next] = cand;
                heap.push(Entry(cand, next));
            }
        }
    }
    Ok(ValueField { weights, values, kind, seeds, rank })
}

/// Label-correcting fixpoint of the same Bellman equations, for checking
/// [`field_from_weights`] on small grids.
pub fn bellman_ford(weights: &ArcWeights, seeds: &[usize], kind: FieldKind) -> Vec<f64> {
    let grid = &weights.grid;
    let mut values = vec![f64::INFINITY; grid.len()];
    for &s in seeds {
        values[s] = 0.0;
    }
    for _ in 0..grid.len() {
        let mut changed = false;
        for node in 0..grid.len() {
            for mv in 0..grid.move_count() {
                let Some(b) = grid.step(node, mv) else { continue };
                let w = weights.weight(node, mv);
                let (from, to) = match kind {
                    FieldKind::Target => (b, node),
                    FieldKind::Source => (node, b),
                };
                let cand = values[from] + w;
                if cand < values[to] {
                    values[to] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    values
}

/// A cheapest path from a start node to the seed set.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalPath {
    pub nodes: Vec<usize>,
    /// `segment_costs[k]` is the cost between `nodes[k]` and `nodes[k + 1]`.
    pub segment_costs: Vec<f64>,
    pub total: f64,
}

/// Follows arcs attaining the Bellman equation from `start` down to the
/// seeds. For target fields the path runs forward in time; for source
/// fields it runs backward, from the reached state to `X_0`.
pub fn reconstruct_path(field: &ValueField, start: usize) -> Result<OptimalPath> {
    let grid = field.grid();
    if start >= grid.len() {
        return invalid(format!("node {start} is not on the grid"));
    }
    if !field.values[start].is_finite() {
        return invalid(format!("value at node {start} is infinite"));
    }
    let mut nodes = vec![start];
    let mut segment_costs = Vec::new();
    let mut cur = start;
    while !field.is_seed(cur) {
        let here = field.values[cur];
        let mut best: Option<(f64, usize, f64)> = None;
        for mv in 0..grid.move_count() {
            let (next, w) = match field.kind {
                FieldKind::Target => match grid.step(cur, mv) {
                    Some(b) => (b, field.weights.weight(cur, mv)),
                    None => continue,
                },
                FieldKind::Source => match grid.step(cur, grid.opposite(mv)) {
                    Some(p) => (p, field.weights.weight(p, mv)),
                    None => continue,
                },
            };
            if field.rank[next] >= field.rank[cur] {
                continue;
            }
            let residual = (field.values[next] + w - here).abs();
            if residual <= 1e-9 && best.is_none_or(|(r, _, _)| residual < r) {
                best = Some((residual, next, w));
            }
        }
        let Some((_, next, w)) = best else {
            return Err(Error::NumericalFailure(format!("no neighbour attains the value at node {cur}")));
        };
        nodes.push(next);
        segment_costs.push(w);
        cur = next;
    }
    let total = segment_costs.iter().sum();
    Ok(OptimalPath { nodes, segment_costs, total })
}

/// `max |V(a) - V(b)| / |a - b|_1` over grid edges with finite values.
pub fn lipschitz_estimate(field: &ValueField) -> f64 {
    let grid = field.grid();
    let step = 2.0 / grid.denominator() as f64;
    let mut best = 0.0_f64;
    for node in 0..grid.len() {
        for mv in 0..grid.move_count() {
            let Some(b) = grid.step(node, mv) else { continue };
            let (va, vb) = (field.values[node], field.values[b]);
            if va.is_finite() && vb.is_finite() {
                best = best.max((va - vb).abs() / step);
            }
        }
    }
    best
}
