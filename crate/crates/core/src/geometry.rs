//! The probability simplex, its tangent space, the restricted simplex `X_r`
//! and the barycentric lattice used to discretize both.
//!
//! Lattice nodes are stored as integer numerators `k` with a common
//! denominator `M`, so membership and adjacency are exact. Real coordinates
//! are produced on demand.

use std::collections::HashMap;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Absolute tolerance on coordinate sums.
pub const SUM_TOL: f64 = 1e-12;

/// A population state: nonnegative shares summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("simplex point needs at least one coordinate");
        }
        if let Some(c) = coords.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
            return invalid(format!("simplex coordinate {c} is negative or not finite"));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return invalid(format!("simplex coordinates sum to {sum}, expected 1"));
        }
        Ok(SimplexPoint(coords))
    }

    /// Builds a point from unnormalized nonnegative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self> {
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return invalid("weights must have a positive sum");
        }
        SimplexPoint::new(w.iter().map(|v| v / s).collect())
    }

    /// The pure state `e_i` (zero-based `i`).
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        SimplexPoint(c)
    }

    pub fn barycenter(n: usize) -> Self {
        SimplexPoint(vec![1.0 / n as f64; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn min_coord(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when every coordinate is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&c| c > 0.0)
    }

    /// `self + t * v`, validated.
    pub fn shifted(&self, v: &TangentVector, t: f64) -> Result<Self> {
        let c: Vec<f64> = self.0.iter().zip(v.comps()).map(|(x, d)| x + t * d).collect();
        SimplexPoint::new(c)
    }
}

/// A displacement in `Y = {u : sum u = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(comps: Vec<f64>) -> Result<Self> {
        let sum: f64 = comps.iter().sum();
        let scale = comps.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        if comps.iter().any(|c| !c.is_finite()) || sum.abs() > SUM_TOL * scale {
            return invalid(format!("tangent vector components sum to {sum}, expected 0"));
        }
        Ok(TangentVector(comps))
    }

    pub fn zero(n: usize) -> Self {
        TangentVector(vec![0.0; n])
    }

    /// `e_to - e_from` (zero-based indices).
    pub fn swap(n: usize, from: usize, to: usize) -> Self {
        let mut c = vec![0.0; n];
        c[to] += 1.0;
        c[from] -= 1.0;
        TangentVector(c)
    }

    pub fn comps(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        TangentVector(self.0.iter().map(|c| c * t).collect())
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.0.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Orthogonal projection of `w` onto the sum-zero subspace.
pub fn project_to_tangent(w: &[f64]) -> TangentVector {
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    TangentVector(w.iter().map(|c| c - mean).collect())
}

/// Membership in the tangent cone `TX(x)`: every coordinate that is (within
/// `tol`) zero at `x` must not decrease.
pub fn tangent_cone_contains(x: &SimplexPoint, v: &TangentVector, tol: f64) -> bool {
    x.coords().iter().zip(v.comps()).all(|(&xi, &vi)| xi > tol || vi >= -tol)
}

/// Vertices `y_1..y_n` of the restricted simplex `X_r`:
/// `y_i = (1 - (n-1) r) e_i + r * sum_{j != i} e_j`.
pub fn restricted_vertices(n: usize, r: f64) -> Result<Vec<SimplexPoint>> {
    if n < 2 {
        return invalid("need at least two actions");
    }
    let r_max = 1.0 / (2.0 * (n - 1) as f64);
    if !(r > 0.0 && r < r_max) {
        return invalid(format!("r = {r} must lie in (0, {r_max})"));
    }
    Ok((0..n)
        .map(|i| {
            let mut c = vec![r; n];
            c[i] = 1.0 - (n - 1) as f64 * r;
            SimplexPoint(c)
        })
        .collect())
}

/// A pairwise swap: one unit of mass moves from action `from` to action `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: usize,
    pub to: usize,
}

impl Move {
    pub fn reversed(self) -> Move {
        Move { from: self.to, to: self.from }
    }
}

/// A node of a [`BarycentricGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridNode {
    pub index: usize,
    pub point: SimplexPoint,
}

const NO_NODE: u32 = u32::MAX;

/// Lattice points `k / M` of `X` (or of `X_r` when `floor > 0`) together with
/// the `n (n - 1)` pairwise swap moves `(e_j - e_i) / M`.
#[derive(Clone)]
pub struct BarycentricGrid {
    n: usize,
    denom: u32,
    floor: u32,
    numerators: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
    moves: Vec<Move>,
    opposite: Vec<usize>,
    adjacency: Vec<u32>,
}

impl fmt::Debug for BarycentricGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BarycentricGrid")
            .field("n", &self.n)
            .field("denominator", &self.denom)
            .field("floor", &self.floor)
            .field("nodes", &self.len())
            .finish()
    }
}

/// Converts `r` to an integer coordinate floor `r * M`, rejecting values that
/// are not lattice multiples.
pub fn lattice_floor(r: f64, m: u32) -> Result<u32> {
    if !(r >= 0.0) || !r.is_finite() {
        return invalid(format!("r = {r} must be nonnegative"));
    }
    let scaled = r * m as f64;
    let k = scaled.round();
    if (scaled - k).abs() > 1e-9 {
        return invalid(format!("r = {r} is not a multiple of 1/{m}"));
    }
    Ok(k as u32)
}

impl BarycentricGrid {
    /// Grid of `X_r` with denominator `m`; `r = 0` gives the full simplex.
    pub fn new(n: usize, m: u32, r: f64) -> Result<Self> {
        if n >= 2 {
            let r_max = 1.0 / (2.0 * (n - 1) as f64);
            if r >= r_max {
                return invalid(format!("r = {r} must be below {r_max}"));
            }
        }
        let floor = lattice_floor(r, m)?;
        Self::with_floor(n, m, floor)
    }

    /// Grid of lattice points with every numerator at least `floor`.
    pub fn with_floor(n: usize, m: u32, floor: u32) -> Result<Self> {
        if n < 2 {
            return invalid("need at least two actions");
        }
        if m < 2 {
            return invalid(format!("lattice denominator {m} must be at least 2"));
        }
        let reserved = floor as u64 * n as u64;
        if reserved > m as u64 {
            return invalid(format!("floor {floor} leaves no lattice points for M = {m}"));
        }
        let free = m - reserved as u32;

        let mut numerators = Vec::new();
        let mut current = vec![0u32; n];
        enumerate_compositions(free, 0, &mut current, &mut |k| {
            numerators.extend(k.iter().map(|v| v + floor));
        });

        let len = numerators.len() / n;
        let index: HashMap<Vec<u32>, usize> =
            (0..len).map(|i| (numerators[i * n..(i + 1) * n].to_vec(), i)).collect();

        let moves: Vec<Move> = (0..n)
            .flat_map(|from| (0..n).filter(move |&to| to != from).map(move |to| Move { from, to }))
            .collect();
        let opposite = moves
            .iter()
            .map(|mv| moves.iter().position(|o| *o == mv.reversed()).expect("reverse move exists"))
            .collect();

        let mut adjacency = vec![NO_NODE; len * moves.len()];
        let mut scratch = vec![0u32; n];
        for a in 0..len {
            let k = &numerators[a * n..(a + 1) * n];
            for (mi, mv) in moves.iter().enumerate() {
                if k[mv.from] <= floor {
                    continue;
                }
                scratch.copy_from_slice(k);
                scratch[mv.from] -= 1;
                scratch[mv.to] += 1;
                if let Some(&b) = index.get(&scratch) {
                    adjacency[a * moves.len() + mi] = b as u32;
                }
            }
        }

        Ok(BarycentricGrid { n, denom: m, floor, numerators, index, moves, opposite, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> u32 {
        self.denom
    }

    pub fn floor(&self) -> u32 {
        self.floor
    }

    /// The restriction threshold as a real number.
    pub fn r_floor(&self) -> f64 {
        self.floor as f64 / self.denom as f64
    }

    pub fn len(&self) -> usize {
        self.numerators.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn numerators(&self, node: usize) -> &[u32] {
        &self.numerators[node * self.n..(node + 1) * self.n]
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        let m = self.denom as f64;
        self.numerators(node).iter().map(|&k| k as f64 / m).collect()
    }

    pub fn point(&self, node: usize) -> SimplexPoint {
        SimplexPoint(self.coords(node))
    }

    pub fn node(&self, index: usize) -> GridNode {
        GridNode { index, point: self.point(index) }
    }

    pub fn index_of(&self, numerators: &[u32]) -> Option<usize> {
        self.index.get(numerators).copied()
    }

    /// Node closest to `x` in the l1 sense, ties by lowest index.
    pub fn nearest(&self, x: &SimplexPoint) -> usize {
        let mut best = (f64::INFINITY, 0);
        for node in 0..self.len() {
            let d: f64 = self.coords(node).iter().zip(x.coords()).map(|(a, b)| (a - b).abs()).sum();
            if d < best.0 {
                best = (d, node);
            }
        }
        best.1
    }

    /// The grid node at the `i`-th corner of the (restricted) simplex.
    pub fn corner(&self, i: usize) -> usize {
        let mut k = vec![self.floor; self.n];
        k[i] = self.denom - self.floor * (self.n as u32 - 1);
        self.index_of(&k).expect("corner node always exists")
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn move_count(&self) -> usize {
        self.moves.len()
    }

    /// Index of the move undoing `mv`.
    pub fn opposite(&self, mv: usize) -> usize {
        self.opposite[mv]
    }

    /// The node reached from `node` by move `mv`, if it is on the grid.
    pub fn step(&self, node: usize, mv: usize) -> Option<usize> {
        let b = self.adjacency[node * self.moves.len() + mv];
        (b != NO_NODE).then_some(b as usize)
    }

    /// Exact displacement `(e_to - e_from) / M` of a move.
    pub fn displacement(&self, mv: usize) -> TangentVector {
        TangentVector::swap(self.n, self.moves[mv].from, self.moves[mv].to)
            .scaled(1.0 / self.denom as f64)
    }

    /// Midpoint of the segment from `node` along `mv`.
    pub fn midpoint(&self, node: usize, mv: usize) -> SimplexPoint {
        let m2 = 2.0 * self.denom as f64;
        let Move { from, to } = self.moves[mv];
        let mut c: Vec<f64> = self.numerators(node).iter().map(|&k| 2.0 * k as f64 / m2).collect();
        c[from] -= 1.0 / m2;
        c[to] += 1.0 / m2;
        SimplexPoint(c)
    }

    /// All in-grid neighbours of `node` with the exact displacement to each.
    pub fn neighbors(&self, node: usize) -> Vec<(GridNode, TangentVector)> {
        (0..self.moves.len())
            .filter_map(|mv| self.step(node, mv).map(|b| (self.node(b), self.displacement(mv))))
            .collect()
    }

    /// Whether a node's numerators all exceed zero.
    pub fn is_interior(&self, node: usize) -> bool {
        self.numerators(node).iter().all(|&k| k > 0)
    }
}

fn enumerate_compositions(remaining: u32, pos: usize, current: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining;
        emit(current);
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        enumerate_compositions(remaining - k, pos + 1, current, emit);
    }
}

/// Binomial coefficient, used for node counts.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn projection_examples() {
        assert!(close(project_to_tangent(&[1.0, 1.0, 1.0]).comps(), &[0.0, 0.0, 0.0]));
        assert!(close(project_to_tangent(&[1.0, 0.0]).comps(), &[0.5, -0.5]));
        assert!(close(project_to_tangent(&[3.0, 1.0, 0.0]).comps(), &[5.0 / 3.0, -1.0 / 3.0, -4.0 / 3.0]));
    }

    #[test]
    fn tangent_cone_examples() {
        let e1 = SimplexPoint::vertex(2, 0);
        assert!(tangent_cone_contains(&e1, &TangentVector::swap(2, 0, 1), 1e-12));
        assert!(!tangent_cone_contains(&e1, &TangentVector::swap(2, 1, 0), 1e-12));
        let mid = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        for v in [[1.0, -1.0], [-3.0, 3.0], [0.0, 0.0]] {
            assert!(tangent_cone_contains(&mid, &TangentVector::new(v.to_vec()).unwrap(), 1e-12));
        }
    }

    #[test]
    fn restricted_vertex_examples() {
        let y = restricted_vertices(3, 0.1).unwrap();
        assert!(close(y[0].coords(), &[0.8, 0.1, 0.1]));
        let y = restricted_vertices(2, 0.1).unwrap();
        assert!(close(y[0].coords(), &[0.9, 0.1]));
        assert!(close(y[1].coords(), &[0.1, 0.9]));
        let y = restricted_vertices(3, 1e-12).unwrap();
        for (i, yi) in y.iter().enumerate() {
            assert!(close(yi.coords(), SimplexPoint::vertex(3, i).coords()) || yi.coords()[i] > 1.0 - 1e-11);
        }
        assert!(restricted_vertices(3, 0.25).is_err());
        assert!(restricted_vertices(3, 0.0).is_err());
    }

    #[test]
    fn grid_node_counts() {
        let g = BarycentricGrid::new(2, 4, 0.0).unwrap();
        assert_eq!(g.len(), 5);
        let mut x1: Vec<u32> = (0..5).map(|i| g.numerators(i)[0]).collect();
        x1.sort();
        assert_eq!(x1, vec![0, 1, 2, 3, 4]);
        assert_eq!(BarycentricGrid::new(3, 2, 0.0).unwrap().len(), 6);
        assert_eq!(BarycentricGrid::new(3, 10, 0.1).unwrap().len(), 36);
        for (n, m) in [(2usize, 7u32), (3, 13), (4, 9), (5, 6)] {
            let g = BarycentricGrid::new(n, m, 0.0).unwrap();
            assert_eq!(g.len() as u64, binomial(m as u64 + n as u64 - 1, n as u64 - 1));
        }
    }

    #[test]
    fn grid_rejects_off_lattice_r() {
        assert!(BarycentricGrid::new(3, 60, 0.07).is_err());
        assert!(BarycentricGrid::new(3, 10, 0.3).is_err());
        assert!(BarycentricGrid::new(3, 1, 0.0).is_err());
    }

    #[test]
    fn vertex_has_one_inward_neighbor() {
        let g = BarycentricGrid::new(2, 4, 0.0).unwrap();
        let e1 = g.index_of(&[4, 0]).unwrap();
        let nb = g.neighbors(e1);
        assert_eq!(nb.len(), 1);
        assert_eq!(g.numerators(nb[0].0.index), &[3, 1]);
        assert!(close(nb[0].1.comps(), &[-0.25, 0.25]));
    }

    #[test]
    fn interior_node_has_all_moves() {
        let g = BarycentricGrid::new(3, 10, 0.0).unwrap();
        let a = g.index_of(&[4, 3, 3]).unwrap();
        assert_eq!(g.neighbors(a).len(), 6);
    }

    #[test]
    fn restriction_boundary_excludes_moves() {
        let g = BarycentricGrid::new(3, 10, 0.1).unwrap();
        let y1 = g.index_of(&[8, 1, 1]).unwrap();
        let nb = g.neighbors(y1);
        assert_eq!(nb.len(), 2);
        for (node, _) in nb {
            let k = g.numerators(node.index);
            assert!(k[1] >= 1 && k[2] >= 1);
            assert_eq!(k[0], 7);
        }
        assert_eq!(g.corner(0), y1);
    }

    #[test]
    fn neighbors_are_symmetric() {
        for g in [BarycentricGrid::new(3, 12, 0.0).unwrap(), BarycentricGrid::new(4, 12, 1.0 / 12.0).unwrap()] {
            for a in 0..g.len() {
                for mv in 0..g.move_count() {
                    if let Some(b) = g.step(a, mv) {
                        assert_eq!(g.step(b, g.opposite(mv)), Some(a));
                        let d = g.displacement(mv);
                        let back = g.displacement(g.opposite(mv));
                        assert!(close(d.comps(), &back.scaled(-1.0).into_inner()));
                    }
                }
            }
        }
    }

    #[test]
    fn numerators_sum_exactly() {
        let g = BarycentricGrid::new(4, 11, 0.0).unwrap();
        for a in 0..g.len() {
            assert_eq!(g.numerators(a).iter().sum::<u32>(), 11);
        }
    }

    #[test]
    fn simplex_point_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![-0.1, 1.1]).is_err());
        assert!(TangentVector::new(vec![1.0, 1.0]).is_err());
    }
}
