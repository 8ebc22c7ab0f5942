//! Support functions of zero sublevel sets, i.e. the infinitesimal travel
//! costs `σ(x, Δ) = sup{u·Δ : H(x,u) ≤ 0}`.

use super::{check_eta, check_interior, h_limit, l_semilinear, ConjugateSolver, CostKind, EtaHamiltonian, RaySolverConfig};
use crate::error::{invalid, Result};
use crate::game::PayoffMatrix;
use crate::geometry::{tangent_cone_contains, SimplexPoint, TangentVector};

/// `σ(x,Δ)` for the small-noise Hamiltonian. Equal to the semilinear cost
/// `Σ_j Υ_j(Ax)[Δ_j]_+`, and `+∞` outside the tangent cone.
pub fn support_cost_limit(a: &PayoffMatrix, x: &SimplexPoint, delta: &TangentVector) -> f64 {
    if !tangent_cone_contains(x, delta, 1e-12) {
        return f64::INFINITY;
    }
    l_semilinear(a, x, delta)
}

/// `σ^η(x,Δ) = inf_{T>0} T·L^η(x, Δ/T)` for interior `x`.
///
/// The perspective `g(T) = T·L^η(Δ/T)` is convex with `g'(T) = -H^η(x, u*(Δ/T))`,
/// so the minimizer is the root of `H^η(u*) = 0` in `log T`. It is found by
/// Newton's method safeguarded by bisection, on
/// `T ∈ (|Δ|_1/2, 10^12 |Δ|_1/2]`; below the lower end the conjugate is
/// infinite. When `g` is still decreasing at the upper end, the value there
/// is returned.
pub fn support_cost_eta(
    a: &PayoffMatrix,
    eta: f64,
    x: &SimplexPoint,
    delta: &TangentVector,
    cfg: &RaySolverConfig,
) -> Result<f64> {
    check_eta(eta)?;
    check_interior(x)?;
    let solver = ConjugateSolver::new(a, eta, x, *cfg)?;
    support_cost_eta_with(&solver, delta, cfg)
}

pub(crate) fn support_cost_eta_with(solver: &ConjugateSolver, delta: &TangentVector, cfg: &RaySolverConfig) -> Result<f64> {
    let l1 = delta.l1_norm();
    if l1 == 0.0 {
        return Ok(0.0);
    }
    // Re-center so rounding in the sum does not grow under rescaling.
    let mean = delta.comps().iter().sum::<f64>() / delta.dim() as f64;
    let d: Vec<f64> = delta.comps().iter().map(|c| c - mean).collect();
    let base = (l1 / 2.0).ln();
    let mut lo = base + 1e-9;
    let mut hi = base + 1e12f64.ln();

    let scaled = |s: f64| -> Vec<f64> {
        let k = (-s).exp();
        d.iter().map(|c| c * k).collect()
    };

    let far = solver.solve(&scaled(hi), None)?;
    let mut best = hi.exp() * far.value;
    if far.hamiltonian >= 0.0 {
        return Ok(best.max(0.0));
    }

    let mut s = base + 2f64.ln();
    let mut warm: Option<Vec<f64>> = None;
    for _ in 0..200 {
        let sol = solver.solve(&scaled(s), warm.as_deref())?;
        let g = s.exp() * sol.value;
        if g < best {
            best = g;
        }
        let f = sol.hamiltonian;
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        if hi - lo < cfg.bisect_tol || f.abs() < 1e-15 {
            break;
        }
        let step = f / sol.curvature;
        if step.abs() < cfg.bisect_tol {
            break;
        }
        let newton = s + step;
        s = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        warm = Some(sol.maximizer);
    }
    Ok(best.max(0.0))
}

/// `ρ = sup{t ≥ 0 : H^η(x, t d) ≤ 0}` for a unit direction `d ∈ Y`.
///
/// Returns `+∞` when no sign change is found before `cfg.t_max`.
pub fn sublevel_ray_length(
    a: &PayoffMatrix,
    eta: f64,
    x: &SimplexPoint,
    d: &TangentVector,
    cfg: &RaySolverConfig,
) -> Result<f64> {
    if (d.l2_norm() - 1.0).abs() > 1e-9 {
        return invalid("ray direction must have unit length");
    }
    let ham = EtaHamiltonian::new(a, eta, x)?;
    ray_length(&ham, d.comps(), cfg)
}

fn ray_length(ham: &EtaHamiltonian, d: &[f64], cfg: &RaySolverConfig) -> Result<f64> {
    if ham.slope_at_zero(d) > 0.0 {
        return Ok(0.0);
    }
    let at = |t: f64| -> f64 {
        let u: Vec<f64> = d.iter().map(|c| c * t).collect();
        ham.value(&u)
    };
    let mut inside = 0.0;
    let mut t = 1e-6;
    loop {
        if t > cfg.t_max {
            return Ok(f64::INFINITY);
        }
        if at(t) > 0.0 {
            break;
        }
        inside = t;
        t *= 2.0;
    }
    let mut outside = t;
    while outside - inside > cfg.bisect_tol * outside {
        let mid = 0.5 * (inside + outside);
        if at(mid) > 0.0 {
            outside = mid;
        } else {
            inside = mid;
        }
    }
    Ok(inside)
}

/// Orthonormal basis of the sum-zero subspace for `n = 2` or `n = 3`.
fn plane_basis(n: usize) -> Option<Vec<Vec<f64>>> {
    match n {
        2 => Some(vec![vec![-1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]]),
        3 => Some(vec![
            vec![1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0],
            vec![1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()],
        ]),
        _ => None,
    }
}

/// Unit directions used by the ray-based support estimate: both directions
/// for `n = 2`, `samples` evenly spaced angles for `n = 3`.
pub fn sample_directions(n: usize, samples: usize) -> Result<Vec<Vec<f64>>> {
    let basis = match plane_basis(n) {
        Some(b) => b,
        None => return invalid(format!("ray sampling supports n <= 3, got {n}")),
    };
    if n == 2 {
        let b = &basis[0];
        return Ok(vec![b.clone(), b.iter().map(|c| -c).collect()]);
    }
    Ok((0..samples)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            (0..n).map(|i| th.cos() * basis[0][i] + th.sin() * basis[1][i]).collect()
        })
        .collect())
}

/// Ray-sampling estimate of `σ^η(x,Δ)`: `max_d ρ(d)·(d·Δ)` over sampled unit
/// directions. Independent of the conjugate solver; `n ≤ 3` only.
pub fn ray_support_cost(
    a: &PayoffMatrix,
    eta: f64,
    x: &SimplexPoint,
    delta: &TangentVector,
    cfg: &RaySolverConfig,
) -> Result<f64> {
    let ham = EtaHamiltonian::new(a, eta, x)?;
    let mut best = 0.0_f64;
    for d in sample_directions(x.dim(), cfg.dir_samples)? {
        let proj = delta.dot(&d);
        if proj <= 0.0 {
            continue;
        }
        let rho = ray_length(&ham, &d, cfg)?;
        best = best.max(rho * proj);
    }
    Ok(best)
}

/// Edge-cost oracle for the grid solver.
#[derive(Clone, Debug)]
pub struct EdgeCostEvaluator {
    payoff: PayoffMatrix,
    kind: CostKind,
    cfg: RaySolverConfig,
}

impl EdgeCostEvaluator {
    pub fn new(payoff: PayoffMatrix, kind: CostKind, cfg: RaySolverConfig) -> Result<Self> {
        if let CostKind::Eta(eta) = kind {
            check_eta(eta)?;
        }
        cfg.validate()?;
        Ok(EdgeCostEvaluator { payoff, kind, cfg })
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn payoff(&self) -> &PayoffMatrix {
        &self.payoff
    }

    pub fn config(&self) -> &RaySolverConfig {
        &self.cfg
    }

    /// `σ(x, Δ)` for the configured Hamiltonian.
    pub fn cost(&self, x: &SimplexPoint, delta: &TangentVector) -> Result<f64> {
        match self.kind {
            CostKind::Limit => Ok(support_cost_limit(&self.payoff, x, delta)),
            CostKind::Eta(eta) => support_cost_eta(&self.payoff, eta, x, delta, &self.cfg),
        }
    }

    /// The Hamiltonian itself, for sampling checks.
    pub fn hamiltonian(&self, x: &SimplexPoint, u: &TangentVector) -> Result<f64> {
        match self.kind {
            CostKind::Limit => Ok(h_limit(&self.payoff, x, u)),
            CostKind::Eta(eta) => super::h_eta(&self.payoff, eta, x, u),
        }
    }
}
