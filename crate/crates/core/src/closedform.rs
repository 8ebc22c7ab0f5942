//! Exact formulas for two-action games with `A^{1-2} = (α, -β)`.
//!
//! States are parametrized by `x_1`. The target value is
//! `V(x_1) = ∫_{x*}^{x_1} (α s - β(1 - s)) ds` with `x* = β/(α+β)`, and the
//! finite-noise value adds `η(F(x_1) - F(x*))` with the binary entropy
//! `F(s) = -s ln s - (1-s) ln(1-s)`, frozen beyond `δ_η`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::PayoffMatrix;
use crate::hamiltonian::CostKind;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoActionGame {
    pub alpha: f64,
    pub beta: f64,
}

impl TwoActionGame {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return invalid(format!("alpha = {alpha} and beta = {beta} must be positive"));
        }
        Ok(TwoActionGame { alpha, beta })
    }

    /// Recovers `(α, β)` from any two-action coordination matrix.
    pub fn from_payoff(a: &PayoffMatrix) -> Result<Self> {
        if a.n() != 2 {
            return invalid("two-action game expected");
        }
        a.validate_coordination()?;
        Self::new(a.entry(0, 0) - a.entry(1, 0), a.entry(1, 1) - a.entry(0, 1))
    }

    pub fn payoff(&self) -> PayoffMatrix {
        PayoffMatrix::two_action(self.alpha, self.beta)
    }
}

pub fn mixed_equilibrium(g: &TwoActionGame) -> f64 {
    g.beta / (g.alpha + g.beta)
}

fn antiderivative(g: &TwoActionGame, s: f64) -> f64 {
    (g.alpha + g.beta) * s * s / 2.0 - g.beta * s
}

/// Binary entropy with `0 ln 0 = 0`.
pub fn entropy(s: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
    term(s) + term(1.0 - s)
}

pub fn v_limit_1d(g: &TwoActionGame, x1: f64) -> f64 {
    let xs = mixed_equilibrium(g);
    if x1 <= xs {
        return 0.0;
    }
    antiderivative(g, x1) - antiderivative(g, xs)
}

/// `(α+β)δ + η ln((1-δ)/δ) - β`, written in `ε = 1 - δ`.
fn delta_equation(g: &TwoActionGame, eta: f64, eps: f64) -> f64 {
    g.alpha - (g.alpha + g.beta) * eps + eta * (eps.ln() - (1.0 - eps).ln())
}

/// `1 - δ_η`, resolved in absolute terms even where `δ_η` rounds to 1.
/// Returns 0 when the gap underflows.
pub fn delta_eta_gap(g: &TwoActionGame, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return invalid(format!("eta = {eta} must be positive"));
    }
    // Scan ε = 1 - δ upward on a log grid: the equation is negative near
    // ε = 0 and the first sign change marks the largest root in δ.
    let eps_max = 1.0 - mixed_equilibrium(g) - 1e-12;
    let eps_min = f64::MIN_POSITIVE;
    if delta_equation(g, eta, eps_min) >= 0.0 {
        return Ok(0.0);
    }
    let steps = 20_000;
    let ratio = (eps_max / eps_min).ln() / steps as f64;
    let mut lo = eps_min;
    let mut hi = None;
    for k in 1..=steps {
        let eps = (eps_min.ln() + ratio * k as f64).exp().min(eps_max);
        if delta_equation(g, eta, eps) >= 0.0 {
            hi = Some(eps);
            break;
        }
        lo = eps;
    }
    let Some(mut hi) = hi else {
        return Err(Error::NumericalFailure(format!("delta_eta: no sign change for eta = {eta}")));
    };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if delta_equation(g, eta, mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest root `δ_η ∈ (x*, 1)` of `(α+β)δ + η ln((1-δ)/δ) = β`.
pub fn delta_eta(g: &TwoActionGame, eta: f64) -> Result<f64> {
    Ok(1.0 - delta_eta_gap(g, eta)?)
}

/// Finite-noise target value.
pub fn v_eta_1d(g: &TwoActionGame, eta: f64, x1: f64) -> Result<f64> {
    let xs = mixed_equilibrium(g);
    let d = delta_eta(g, eta)?;
    if x1 <= xs {
        return Ok(0.0);
    }
    let s = x1.min(d);
    Ok(v_limit_1d(g, s) + eta * (entropy(s) - entropy(xs)))
}

/// Endpoint `α x_1 - β x_2 + η(ln x_2 - ln x_1)` of `N^η(x) = [0, ·]` in the
/// co-state coordinate `p = u_1 - u_2`; `η = 0` gives `N(x)`.
pub fn interval_endpoint(g: &TwoActionGame, eta: f64, x1: f64) -> f64 {
    let x2 = 1.0 - x1;
    let base = g.alpha * x1 - g.beta * x2;
    if eta == 0.0 {
        base
    } else {
        base + eta * (x2.ln() - x1.ln())
    }
}

/// `N^η(x)` for `x* ≤ x_1 ≤ δ_η`.
pub fn interval_n_eta_1d(g: &TwoActionGame, eta: f64, x1: f64) -> Result<(f64, f64)> {
    let d = delta_eta(g, eta)?;
    let xs = mixed_equilibrium(g);
    if !(x1 > 0.0 && x1 < 1.0 && x1 >= xs && x1 <= d) {
        return invalid(format!("x1 = {x1} outside [{xs}, {d}]"));
    }
    Ok((0.0, interval_endpoint(g, eta, x1).max(0.0)))
}

/// Closed-form value for either cost.
pub fn value_1d(g: &TwoActionGame, cost: CostKind, x1: f64) -> Result<f64> {
    match cost {
        CostKind::Limit => Ok(v_limit_1d(g, x1)),
        CostKind::Eta(eta) => v_eta_1d(g, eta, x1),
    }
}
