//! Hamiltonians of the logit dynamics and the quantities derived from them.
//!
//! * [`h_limit`] is the small-noise Hamiltonian
//!   `H(x,u) = max_{i,j}(u_j - Υ_j(Ax) - u_i) ∨ 0`.
//! * [`h_eta`] is the finite-noise Hamiltonian
//!   `H^η(x,u) = η log(Σ_{i,j} x_i e^{(u_j-u_i)/η} σ^η_j(Ax))`, evaluated in
//!   log-sum-exp form.
//! * [`legendre_l_eta`] is its numerical convex conjugate.
//! * [`support_cost_limit`] and [`support_cost_eta`] give the support function
//!   of the zero sublevel set, which is the infinitesimal travel cost used by
//!   the grid solver.
//!
//! The running cost field of the semilinear Lagrangian is `x ↦ Υ(Ax)`.

mod conjugate;
mod support;

pub use conjugate::{legendre_l_eta, Conjugate, ConjugateSolver};
pub use support::{
    ray_support_cost, sample_directions, sublevel_ray_length, support_cost_eta, support_cost_limit,
    EdgeCostEvaluator,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{unlikelihood, PayoffMatrix};
use crate::geometry::{tangent_cone_contains, SimplexPoint, TangentVector};

/// Numerical knobs for ray searches, the conjugate solver and the dual
/// minimization behind [`support_cost_eta`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaySolverConfig {
    pub t_max: f64,
    pub bisect_tol: f64,
    pub dir_samples: usize,
    pub newton_max_iter: usize,
    pub newton_tol: f64,
}

impl Default for RaySolverConfig {
    fn default() -> Self {
        RaySolverConfig { t_max: 1e6, bisect_tol: 1e-10, dir_samples: 720, newton_max_iter: 200, newton_tol: 1e-10 }
    }
}

impl RaySolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_max > 0.0
            && self.bisect_tol > 0.0
            && self.dir_samples > 0
            && self.newton_max_iter > 0
            && self.newton_tol > 0.0;
        if ok {
            Ok(())
        } else {
            invalid("all ray solver settings must be positive")
        }
    }
}

/// Which Hamiltonian a computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "eta")]
pub enum CostKind {
    Limit,
    Eta(f64),
}

impl CostKind {
    pub fn eta(&self) -> Option<f64> {
        match self {
            CostKind::Limit => None,
            CostKind::Eta(e) => Some(*e),
        }
    }
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        invalid(format!("noise level eta = {eta} must be positive"))
    }
}

pub(crate) fn check_interior(x: &SimplexPoint) -> Result<()> {
    if x.is_interior() {
        Ok(())
    } else {
        Err(Error::BoundaryPoint(format!("{:?}", x.coords())))
    }
}

pub(crate) fn log_sum_exp(vals: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = vals.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + vals.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `H(x,u) = max_{i,j}(u_j - Υ_j(Ax) - u_i) ∨ 0`.
pub fn h_limit(a: &PayoffMatrix, x: &SimplexPoint, u: &TangentVector) -> f64 {
    let ups = unlikelihood(&a.payoff_vector(x.coords()));
    let u = u.comps();
    let min_u = u.iter().copied().fold(f64::INFINITY, f64::min);
    // The (i, j) terms separate: the best i is the one minimizing u_i.
    let best = (0..u.len()).map(|j| u[j] - ups[j]).fold(f64::NEG_INFINITY, f64::max) - min_u;
    best.max(0.0)
}

/// Cached pieces of `H^η(x, ·)` at a fixed state.
#[derive(Clone, Debug)]
pub(crate) struct EtaHamiltonian {
    pub eta: f64,
    log_x: Vec<f64>,
    scaled_pi: Vec<f64>,
    lse_pi: f64,
}

/// Value, gradient and the two softmax weight vectors at a co-state.
pub(crate) struct EtaEval {
    pub value: f64,
    pub grad: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
}

impl EtaHamiltonian {
    pub fn new(a: &PayoffMatrix, eta: f64, x: &SimplexPoint) -> Result<Self> {
        check_eta(eta)?;
        if a.n() != x.dim() {
            return invalid("payoff matrix and state dimensions differ");
        }
        let scaled_pi: Vec<f64> = a.payoff_vector(x.coords()).iter().map(|p| p / eta).collect();
        let lse_pi = log_sum_exp(scaled_pi.iter().copied());
        let log_x = x.coords().iter().map(|&c| if c > 0.0 { c.ln() } else { f64::NEG_INFINITY }).collect();
        Ok(EtaHamiltonian { eta, log_x, scaled_pi, lse_pi })
    }

    pub fn n(&self) -> usize {
        self.log_x.len()
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        let eta = self.eta;
        let left = log_sum_exp(self.log_x.iter().zip(u).map(move |(lx, ui)| lx - ui / eta));
        let right = log_sum_exp(self.scaled_pi.iter().zip(u).map(move |(p, uj)| p + uj / eta));
        eta * (left + right - self.lse_pi)
    }

    /// Value and gradient; `grad = s - w` with `w_i ∝ x_i e^{-u_i/η}` and
    /// `s = softmax((u + Ax)/η)`.
    pub fn eval(&self, u: &[f64]) -> EtaEval {
        let eta = self.eta;
        let lw: Vec<f64> = self.log_x.iter().zip(u).map(|(lx, ui)| lx - ui / eta).collect();
        let ls: Vec<f64> = self.scaled_pi.iter().zip(u).map(|(p, uj)| p + uj / eta).collect();
        let lse_w = log_sum_exp(lw.iter().copied());
        let lse_s = log_sum_exp(ls.iter().copied());
        let w: Vec<f64> = lw.iter().map(|v| (v - lse_w).exp()).collect();
        let s: Vec<f64> = ls.iter().map(|v| (v - lse_s).exp()).collect();
        let grad = s.iter().zip(&w).map(|(a, b)| a - b).collect();
        EtaEval { value: eta * (lse_w + lse_s - self.lse_pi), grad, w, s }
    }

    /// Directional derivative at `u = 0`: `(σ^η(Ax) - x) · d`.
    pub fn slope_at_zero(&self, d: &[f64]) -> f64 {
        let e = self.eval(&vec![0.0; self.n()]);
        e.grad.iter().zip(d).map(|(g, di)| g * di).sum()
    }
}

/// `H^η(x,u)`; finite for every `x` in the closed simplex.
pub fn h_eta(a: &PayoffMatrix, eta: f64, x: &SimplexPoint, u: &TangentVector) -> Result<f64> {
    Ok(EtaHamiltonian::new(a, eta, x)?.value(u.comps()))
}

/// Gradient of `u ↦ H^η(x,u)`; lies in the sum-zero subspace.
pub fn h_eta_gradient(a: &PayoffMatrix, eta: f64, x: &SimplexPoint, u: &TangentVector) -> Result<TangentVector> {
    let g = EtaHamiltonian::new(a, eta, x)?.eval(u.comps()).grad;
    Ok(crate::geometry::project_to_tangent(&g))
}

/// Semilinear running cost `L(x,v) = Σ_j Υ_j(Ax)[v_j]_+` on the tangent cone,
/// `+∞` outside it.
pub fn l_semilinear(a: &PayoffMatrix, x: &SimplexPoint, v: &TangentVector) -> f64 {
    if !tangent_cone_contains(x, v, 1e-12) {
        return f64::INFINITY;
    }
    let ups = unlikelihood(&a.payoff_vector(x.coords()));
    ups.iter().zip(v.comps()).map(|(c, vj)| c * vj.max(0.0)).sum()
}

/// Lower bound `(2/n)|u|_1 - 2 max_x |Υ(Ax)|_1` on `H`, valid on all of `X`.
pub fn limit_coercivity_floor(a: &PayoffMatrix, u: &TangentVector) -> f64 {
    let n = a.n() as f64;
    2.0 / n * u.l1_norm() - 2.0 * a.max_unlikelihood_l1()
}

/// Lower bound on `H^η(x,u)` for `x ∈ B^{i*} ∩ X_r`:
/// `|p|_1/(n-1) - max_j A^{i*-j}x + η(log r - log n)` with `p_j = u_j - u_{i*}`.
pub fn eta_coercivity_floor(a: &PayoffMatrix, eta: f64, r: f64, x: &SimplexPoint, u: &TangentVector) -> f64 {
    let n = a.n();
    let base = crate::game::best_response_region(a, x.coords(), 0.0).primary();
    let u = u.comps();
    let p_l1: f64 = (0..n).filter(|&j| j != base).map(|j| (u[j] - u[base]).abs()).sum();
    let max_adv =
        (0..n).filter(|&j| j != base).map(|j| a.advantage(base, j, x.coords())).fold(f64::NEG_INFINITY, f64::max);
    p_l1 / (n - 1) as f64 - max_adv + eta * (r.ln() - (n as f64).ln())
}

/// The zero set `N(x) = {u : H(x,u) = 0}`, a box `Π_{j≠i*} [0, A^{i*-j}x]` in
/// the coordinates `p_j = u_j - u_{i*}` where `i*` is the (lowest-index) best
/// response at `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportBox {
    /// Best-response index the box is expressed relative to.
    pub base: usize,
    /// Action index of each box axis, in increasing order, skipping `base`.
    pub axes: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SupportBox {
    /// `p`-coordinates of a co-state.
    pub fn coordinates(&self, u: &[f64]) -> Vec<f64> {
        self.axes.iter().map(|&j| u[j] - u[self.base]).collect()
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        self.coordinates(u).iter().zip(&self.lo).zip(&self.hi).all(|((p, lo), hi)| *p >= lo - tol && *p <= hi + tol)
    }

    /// Lifts `p`-coordinates back to a sum-zero co-state.
    pub fn co_state(&self, p: &[f64]) -> TangentVector {
        let mut u = vec![0.0; self.axes.len() + 1];
        for (pj, &j) in p.iter().zip(&self.axes) {
            u[j] = *pj;
        }
        crate::geometry::project_to_tangent(&u)
    }

    /// The `2^(n-1)` corners of `theta · N(x)` as co-states.
    pub fn scaled_vertices(&self, theta: f64) -> Vec<TangentVector> {
        let d = self.axes.len();
        (0..1usize << d)
            .map(|mask| {
                let p: Vec<f64> =
                    (0..d).map(|k| theta * if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] }).collect();
                self.co_state(&p)
            })
            .collect()
    }

    /// `sup_{u ∈ box} u·Δ`.
    pub fn support(&self, delta: &TangentVector) -> f64 {
        let dl = delta.comps();
        self.axes
            .iter()
            .enumerate()
            .map(|(k, &j)| (self.hi[k] * dl[j]).max(self.lo[k] * dl[j]))
            .sum()
    }
}

pub fn zero_box(a: &PayoffMatrix, x: &SimplexPoint) -> SupportBox {
    let pi = a.payoff_vector(x.coords());
    let base = (0..pi.len()).fold(0, |b, i| if pi[i] > pi[b] { i } else { b });
    let axes: Vec<usize> = (0..pi.len()).filter(|&j| j != base).collect();
    let hi = axes.iter().map(|&j| (pi[base] - pi[j]).max(0.0)).collect();
    SupportBox { base, lo: vec![0.0; axes.len()], axes, hi }
}
