//! Numerical Legendre transform of `H^η(x, ·)`.
//!
//! The objective `u ↦ u·v - H^η(x,u)` is smooth and concave on the sum-zero
//! subspace. It is maximized by damped Newton ascent with the analytic
//! Hessian `(diag w - w wᵀ + diag s - s sᵀ)/η`. The Hessian annihilates the
//! all-ones vector, so the Newton system is solved with `11ᵀ/(nη)` added,
//! which leaves steps inside the subspace.
//!
//! The conjugate is finite exactly on `{v ∈ Y : |v|_1 ≤ 2}` for interior `x`.
//! On the boundary sphere the supremum is approached at infinity; ascent
//! still terminates because the gradient decays geometrically along the
//! escaping direction.

use nalgebra::{DMatrix, DVector};

use super::{check_eta, check_interior, EtaHamiltonian, RaySolverConfig};
use crate::error::{invalid, Error, Result};
use crate::game::PayoffMatrix;
use crate::geometry::{SimplexPoint, TangentVector, SUM_TOL};

/// Result of one conjugate evaluation.
#[derive(Clone, Debug)]
pub struct Conjugate {
    /// `L^η(x, v)`.
    pub value: f64,
    /// Approximate maximizer `u*`.
    pub maximizer: Vec<f64>,
    /// `H^η(x, u*)`.
    pub hamiltonian: f64,
    /// `vᵀ (∇²H^η(x,u*))⁻¹ v` on the sum-zero subspace.
    pub curvature: f64,
    pub iterations: usize,
}

/// Reusable conjugate evaluator at a fixed state.
#[derive(Clone, Debug)]
pub struct ConjugateSolver {
    ham: EtaHamiltonian,
    cfg: RaySolverConfig,
}

impl ConjugateSolver {
    pub fn new(a: &PayoffMatrix, eta: f64, x: &SimplexPoint, cfg: RaySolverConfig) -> Result<Self> {
        check_eta(eta)?;
        check_interior(x)?;
        cfg.validate()?;
        Ok(ConjugateSolver { ham: EtaHamiltonian::new(a, eta, x)?, cfg })
    }

    /// `L^η(x, v)`, starting the ascent at `warm` when given.
    pub fn solve(&self, v: &[f64], warm: Option<&[f64]>) -> Result<Conjugate> {
        let n = self.ham.n();
        if v.len() != n {
            return invalid("direction has the wrong dimension");
        }
        let l1: f64 = v.iter().map(|c| c.abs()).sum();
        if v.iter().sum::<f64>().abs() > SUM_TOL * l1.max(1.0) {
            return invalid("direction must sum to zero");
        }
        if l1 > 2.0 * (1.0 + 1e-12) {
            return Ok(Conjugate {
                value: f64::INFINITY,
                maximizer: Vec::new(),
                hamiltonian: f64::INFINITY,
                curvature: 0.0,
                iterations: 0,
            });
        }

        let eta = self.ham.eta;
        let mut u: Vec<f64> = match warm {
            Some(w) if w.len() == n && w.iter().all(|c| c.is_finite()) => w.to_vec(),
            _ => vec![0.0; n],
        };
        let objective = |u: &[f64], h: f64| -> f64 { u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - h };

        let mut eval = self.ham.eval(&u);
        for it in 0..self.cfg.newton_max_iter {
            let g: Vec<f64> = v.iter().zip(&eval.grad).map(|(vi, gi)| vi - gi).collect();
            let gnorm = g.iter().map(|c| c * c).sum::<f64>().sqrt();
            let hess = newton_matrix(&eval.w, &eval.s, eta);
            if gnorm < self.cfg.newton_tol {
                let curvature = solve_spd(&hess, v).map(|z| dot(&z, v)).unwrap_or(f64::INFINITY);
                return Ok(Conjugate {
                    value: objective(&u, eval.value),
                    hamiltonian: eval.value,
                    maximizer: u,
                    curvature,
                    iterations: it,
                });
            }

            let radius = 1.0 + u.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            // Where H^η is numerically flat the Hessian is singular; fall back
            // to a gradient step as long as the trust radius and backtrack.
            let gmax = g.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let gradient_step = || -> Vec<f64> { g.iter().map(|c| c * radius / gmax).collect() };
            let mut dir = solve_spd(&hess, &g).unwrap_or_else(gradient_step);
            let mut slope = dot(&g, &dir);
            if !(slope > 0.0) {
                dir = gradient_step();
                slope = dot(&g, &dir);
            }
            let len = dir.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            if len > radius {
                let k = radius / len;
                dir.iter_mut().for_each(|c| *c *= k);
                slope *= k;
            }

            let f0 = objective(&u, eval.value);
            if slope <= 1e-13 * (1.0 + f0.abs()) {
                // The predicted gain is below what the objective can resolve:
                // take the plain Newton step.
                u.iter_mut().zip(&dir).for_each(|(a, d)| *a += d);
                eval = self.ham.eval(&u);
                continue;
            }
            let mut t = 1.0;
            let mut accepted = None;
            while t > 1e-14 {
                let trial: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
                let h = self.ham.value(&trial);
                let f = objective(&trial, h);
                if f >= f0 + 1e-4 * t * slope || (t < 1e-6 && f > f0) {
                    accepted = Some(trial);
                    break;
                }
                t *= 0.5;
            }
            match accepted {
                Some(next) => {
                    u = next;
                    eval = self.ham.eval(&u);
                }
                None => {
                    // Rounding floor: the objective no longer resolves the step.
                    if gnorm < 1e3 * self.cfg.newton_tol {
                        let curvature = solve_spd(&hess, v).map(|z| dot(&z, v)).unwrap_or(f64::INFINITY);
                        return Ok(Conjugate {
                            value: f0,
                            hamiltonian: eval.value,
                            maximizer: u,
                            curvature,
                            iterations: it,
                        });
                    }
                    return Err(Error::NumericalFailure(format!(
                        "conjugate line search stalled at gradient norm {gnorm:e}"
                    )));
                }
            }
        }
        Err(Error::NumericalFailure(format!(
            "conjugate ascent did not converge in {} iterations",
            self.cfg.newton_max_iter
        )))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn newton_matrix(w: &[f64], s: &[f64], eta: f64) -> DMatrix<f64> {
    let n = w.len();
    let shift = 1.0 / (n as f64 * eta);
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { w[i] + s[i] } else { 0.0 };
        (diag - w[i] * w[j] - s[i] * s[j]) / eta + shift
    })
}

fn solve_spd(m: &DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let b = DVector::from_column_slice(rhs);
    let z = match m.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => m.clone().lu().solve(&b)?,
    };
    z.iter().all(|c| c.is_finite()).then(|| z.iter().copied().collect())
}

/// `L^η(x,v) = sup_{u ∈ Y} (u·v - H^η(x,u))` for interior `x`.
///
/// Returns `+∞` when `|v|_1 > 2`, where the conjugate is unbounded.
pub fn legendre_l_eta(
    a: &PayoffMatrix,
    eta: f64,
    x: &SimplexPoint,
    v: &TangentVector,
    cfg: &RaySolverConfig,
) -> Result<f64> {
    Ok(ConjugateSolver::new(a, eta, x, *cfg)?.solve(v.comps(), None)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::h_eta;

    fn pt(c: &[f64]) -> SimplexPoint {
        SimplexPoint::new(c.to_vec()).unwrap()
    }

    /// `L^η(x, e_j - e_i) = -η log(x_i σ^η_j(Ax))`: the lower bound
    /// `H^η(x,u) ≥ (u_j - u_i) + η log(x_i σ_j)` is approached as
    /// `u_j - u_i → ∞` along `u = k(e_j - e_i)`.
    fn swap_conjugate_closed_form(a: &PayoffMatrix, eta: f64, x: &[f64], i: usize, j: usize) -> f64 {
        let pi = a.payoff_vector(x);
        let max = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = pi.iter().map(|p| ((p - max) / eta).exp()).sum();
        let log_sigma_j = (pi[j] - max) / eta - z.ln();
        -eta * (x[i].ln() + log_sigma_j)
    }

    #[test]
    fn conjugate_at_zero_is_minus_min_h() {
        let a = PayoffMatrix::identity(3);
        let x = pt(&[0.5, 0.3, 0.2]);
        let sol = ConjugateSolver::new(&a, 0.1, &x, RaySolverConfig::default())
            .unwrap()
            .solve(&[0.0, 0.0, 0.0], None)
            .unwrap();
        assert!(sol.value >= 0.0);
        assert!((sol.value + sol.hamiltonian).abs() < 1e-12);
        // The maximizer minimizes H: nothing sampled nearby is lower.
        for d in [[0.01, -0.01, 0.0], [0.0, 0.01, -0.01], [-0.01, 0.0, 0.01]] {
            let u: Vec<f64> = sol.maximizer.iter().zip(d).map(|(a, b)| a + b).collect();
            let h = h_eta(&a, 0.1, &x, &TangentVector::new(u).unwrap()).unwrap();
            assert!(h >= sol.hamiltonian - 1e-12);
        }
    }

    #[test]
    fn swap_directions_match_closed_form() {
        let a = PayoffMatrix::identity(3);
        let cfg = RaySolverConfig::default();
        for x in [[0.5, 0.3, 0.2], [0.9, 0.05, 0.05], [0.2, 0.2, 0.6]] {
            for eta in [0.2, 0.1, 0.05] {
                for i in 0..3 {
                    for j in 0..3 {
                        if i == j {
                            continue;
                        }
                        let v = TangentVector::swap(3, i, j);
                        let l = legendre_l_eta(&a, eta, &pt(&x), &v, &cfg).unwrap();
                        let exact = swap_conjugate_closed_form(&a, eta, &x, i, j);
                        assert!((l - exact).abs() < 1e-8, "x={x:?} eta={eta} {i}->{j}: {l} vs {exact}");
                        assert!(l >= -eta * x[i].ln() - eta * 2f64.ln() - 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn outside_the_unit_ball_is_infinite() {
        let a = PayoffMatrix::identity(2);
        let x = pt(&[0.5, 0.5]);
        let v = TangentVector::new(vec![1.5, -1.5]).unwrap();
        assert_eq!(legendre_l_eta(&a, 0.1, &x, &v, &RaySolverConfig::default()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn boundary_state_is_rejected() {
        let a = PayoffMatrix::identity(2);
        let v = TangentVector::swap(2, 0, 1);
        let r = legendre_l_eta(&a, 0.1, &SimplexPoint::vertex(2, 0), &v, &RaySolverConfig::default());
        assert!(matches!(r, Err(Error::BoundaryPoint(_))));
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let a = PayoffMatrix::identity(3);
        let cfg = RaySolverConfig { newton_max_iter: 1, ..RaySolverConfig::default() };
        let r = legendre_l_eta(&a, 0.05, &pt(&[0.5, 0.3, 0.2]), &TangentVector::swap(3, 0, 2), &cfg);
        assert!(matches!(r, Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn conjugate_dominates_swap_support_cost() {
        let a = PayoffMatrix::identity(2);
        let x = pt(&[0.75, 0.25]);
        let v = TangentVector::swap(2, 0, 1);
        let l = legendre_l_eta(&a, 0.1, &x, &v, &RaySolverConfig::default()).unwrap();
        assert!(l >= 0.5 + 0.1 * (1.0f64 / 3.0).ln());
    }
}
