//! Symmetric two-player payoff matrices, best-response regions and the
//! target set `Z = B^2 ∪ … ∪ B^n`.
//!
//! Indices are zero-based throughout: action `0` plays the role of the
//! resident equilibrium `e_1`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Payoff table with `entry(i, j)` the payoff to an `i`-player matched
/// against a `j`-player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PayoffMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    /// Builds a square matrix from its rows. Coordination is not checked
    /// here; see [`PayoffMatrix::validate_coordination`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return invalid("payoff matrix needs at least two actions");
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return invalid(format!("row {i} has {} entries, expected {n}", r.len()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|v| !v.is_finite()) {
            return invalid("payoff entries must be finite");
        }
        Ok(PayoffMatrix { n, entries })
    }

    /// Builds and validates a coordination game.
    pub fn coordination(rows: Vec<Vec<f64>>) -> Result<Self> {
        let a = Self::from_rows(rows)?;
        a.validate_coordination()?;
        Ok(a)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        PayoffMatrix { n, entries }
    }

    /// The two-action game with `A^{1-2} = (alpha, -beta)`, normalized so the
    /// second row is zero.
    pub fn two_action(alpha: f64, beta: f64) -> Self {
        PayoffMatrix { n: 2, entries: vec![alpha, -beta, 0.0, 0.0] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Checks `A[i][i] > A[j][i]` for every column `i` and row `j != i`,
    /// reporting the first violation in column-major order.
    pub fn validate_coordination(&self) -> Result<()> {
        for column in 0..self.n {
            let diag = self.entry(column, column);
            for row in 0..self.n {
                if row != column && !(diag > self.entry(row, column)) {
                    return Err(Error::NotCoordination { row, column });
                }
            }
        }
        Ok(())
    }

    /// The payoff vector `A x`.
    pub fn payoff_vector(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `A^{i-j} x = A^i x - A^j x`.
    pub fn advantage(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        self.row(i).iter().zip(self.row(j)).zip(x).map(|((a, b), c)| (a - b) * c).sum()
    }

    /// `max_x |Υ(Ax)|_1` over the simplex. The map is convex and piecewise
    /// linear, so the maximum sits at a vertex.
    pub fn max_unlikelihood_l1(&self) -> f64 {
        (0..self.n)
            .map(|k| {
                let col: Vec<f64> = (0..self.n).map(|i| self.entry(i, k)).collect();
                unlikelihood(&col).iter().sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `max_x max_{i,j} (A^i x - A^j x)` over the simplex (vertex maximum).
    pub fn max_payoff_spread(&self) -> f64 {
        (0..self.n)
            .map(|k| {
                let col: Vec<f64> = (0..self.n).map(|i| self.entry(i, k)).collect();
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Vec<f64>>> for PayoffMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        PayoffMatrix::from_rows(rows)
    }
}

impl From<PayoffMatrix> for Vec<Vec<f64>> {
    fn from(a: PayoffMatrix) -> Self {
        a.rows()
    }
}

/// `Υ_j(π) = max_i π_i - π_j`.
pub fn unlikelihood(pi: &[f64]) -> Vec<f64> {
    let max = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    pi.iter().map(|p| max - p).collect()
}

/// Indices of all actions that are best responses at a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionLabel(Vec<usize>);

impl RegionLabel {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    /// The lowest best-response index.
    pub fn primary(&self) -> usize {
        self.0[0]
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "B^{{{}}}", labels.join(","))
    }
}

pub fn best_response_region(a: &PayoffMatrix, x: &[f64], tol: f64) -> RegionLabel {
    let pi = a.payoff_vector(x);
    let max = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    RegionLabel((0..a.n()).filter(|&i| pi[i] >= max - tol).collect())
}

/// `x ∈ Z`: some action other than the first does at least as well as it.
pub fn in_target_z(a: &PayoffMatrix, x: &[f64], tol: f64) -> bool {
    (1..a.n()).any(|j| a.advantage(j, 0, x) >= -tol)
}

/// Membership in `Z` for a lattice point given by integer numerators. The
/// comparison is scale free, so the denominator is not needed, and it is
/// exact when the payoffs are integers.
pub fn in_target_z_lattice(a: &PayoffMatrix, k: &[u32]) -> bool {
    let x: Vec<f64> = k.iter().map(|&v| v as f64).collect();
    in_target_z(a, &x, 0.0)
}

/// Seed-set predicate for target and source problems.
#[derive(Clone)]
pub enum Target {
    /// `Z = closure(X \ B^1)`.
    LeaveFirst,
    /// An arbitrary predicate on lattice numerators.
    Custom(Arc<dyn Fn(&[u32]) -> bool + Send + Sync>),
}

impl Target {
    pub fn contains(&self, a: &PayoffMatrix, k: &[u32]) -> bool {
        match self {
            Target::LeaveFirst => in_target_z_lattice(a, k),
            Target::Custom(f) => f(k),
        }
    }
}

impl fmt::Debug for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::LeaveFirst => write!(f, "Target::LeaveFirst"),
            Target::Custom(_) => write!(f, "Target::Custom(..)"),
        }
    }
}
