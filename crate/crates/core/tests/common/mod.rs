#![allow(dead_code)]

use logit_hj::game::PayoffMatrix;
use logit_hj::geometry::{project_to_tangent, SimplexPoint, TangentVector};
use logit_hj::hamiltonian::{h_eta, legendre_l_eta, support_cost_eta, RaySolverConfig};
use logit_hj::mcsim::{logit_choice, step, trial_rng, PopulationState};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 1000;

/// Deterministic runner, so acceptance results repeat exactly.
pub fn runner(cases: u32) -> TestRunner {
    let cfg = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Coordination games with diagonal in `[1, 2]` and off-diagonal in `[-1, 0.5]`.
pub fn payoff(n: usize) -> impl Strategy<Value = PayoffMatrix> {
    prop::collection::vec(-1.0..0.5f64, n * n).prop_flat_map(move |off| {
        prop::collection::vec(1.0..2.0f64, n).prop_map(move |diag| {
            let rows = (0..n)
                .map(|i| (0..n).map(|j| if i == j { diag[i] } else { off[i * n + j] }).collect())
                .collect();
            PayoffMatrix::coordination(rows).unwrap()
        })
    })
}

pub fn interior(n: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0.05..1.0f64, n).prop_map(|w| SimplexPoint::from_weights(&w).unwrap())
}

/// Sum-zero vectors with components of size up to `scale`.
pub fn tangent(n: usize, scale: f64) -> impl Strategy<Value = TangentVector> {
    prop::collection::vec(-scale..scale, n).prop_map(|v| project_to_tangent(&v))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn ok<T>(r: logit_hj::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn game_point(n: usize) -> impl Strategy<Value = (PayoffMatrix, SimplexPoint, f64)> {
    (payoff(n), interior(n), 0.02..0.5f64)
}

/// `H^η(x, ·)` is convex.
pub fn convexity(
    (a, x, eta): (PayoffMatrix, SimplexPoint, f64),
    u: TangentVector,
    v: TangentVector,
    lambda: f64,
) -> Result<(), TestCaseError> {
    let mix: Vec<f64> = u.comps().iter().zip(v.comps()).map(|(p, q)| lambda * p + (1.0 - lambda) * q).collect();
    let w = project_to_tangent(&mix);
    let (hu, hv, hw) = (ok(h_eta(&a, eta, &x, &u))?, ok(h_eta(&a, eta, &x, &v))?, ok(h_eta(&a, eta, &x, &w))?);
    let rhs = lambda * hu + (1.0 - lambda) * hv;
    check(hw <= rhs + 1e-9 * (1.0 + rhs.abs()), || format!("H(mix) = {hw} > {rhs}"))
}

/// `L^η(x, v) + H^η(x, u) ≥ u·v`.
pub fn fenchel_young(
    (a, x, eta): (PayoffMatrix, SimplexPoint, f64),
    u: TangentVector,
    v: TangentVector,
) -> Result<(), TestCaseError> {
    let l = ok(legendre_l_eta(&a, eta, &x, &v, &RaySolverConfig::default()))?;
    let h = ok(h_eta(&a, eta, &x, &u))?;
    let uv = u.dot(v.comps());
    check(l + h >= uv - 1e-8 * (1.0 + uv.abs()), || format!("L + H = {} < u.v = {uv}", l + h))
}

/// `σ^η(x, tΔ) = t σ^η(x, Δ)`.
pub fn homogeneity(
    (a, x, eta): (PayoffMatrix, SimplexPoint, f64),
    d: TangentVector,
    t: f64,
) -> Result<(), TestCaseError> {
    let cfg = RaySolverConfig::default();
    let s1 = ok(support_cost_eta(&a, eta, &x, &d, &cfg))?;
    let st = ok(support_cost_eta(&a, eta, &x, &d.scaled(t), &cfg))?;
    check((st - t * s1).abs() <= 1e-7 * (1.0 + t * s1), || format!("sigma(t d) = {st}, t sigma(d) = {}", t * s1))
}

/// `σ^η(x, Δ1 + Δ2) ≤ σ^η(x, Δ1) + σ^η(x, Δ2)`.
pub fn subadditivity(
    (a, x, eta): (PayoffMatrix, SimplexPoint, f64),
    d1: TangentVector,
    d2: TangentVector,
) -> Result<(), TestCaseError> {
    let cfg = RaySolverConfig::default();
    let sum: Vec<f64> = d1.comps().iter().zip(d2.comps()).map(|(p, q)| p + q).collect();
    let sum = project_to_tangent(&sum);
    let s = ok(support_cost_eta(&a, eta, &x, &sum, &cfg))?;
    let s1 = ok(support_cost_eta(&a, eta, &x, &d1, &cfg))?;
    let s2 = ok(support_cost_eta(&a, eta, &x, &d2, &cfg))?;
    check(s <= s1 + s2 + 1e-9 * (1.0 + s1 + s2), || format!("sigma(d1+d2) = {s} > {}", s1 + s2))
}

/// Logit choice probabilities ignore a common payoff shift.
pub fn softmax_shift(pi: Vec<f64>, shift: f64, eta: f64) -> Result<(), TestCaseError> {
    let p = logit_choice(&pi, eta);
    let shifted: Vec<f64> = pi.iter().map(|v| v + shift).collect();
    let q = logit_choice(&shifted, eta);
    let total: f64 = p.iter().sum();
    check((total - 1.0).abs() <= 1e-12, || format!("probabilities sum to {total}"))?;
    for (a, b) in p.iter().zip(&q) {
        check((a - b).abs() <= 1e-12, || format!("{p:?} vs {q:?}"))?;
    }
    Ok(())
}

/// A revision step keeps the population size and moves at most one agent.
pub fn conservation(counts: Vec<u32>, eta: f64, seed: u64) -> Result<(), TestCaseError> {
    let n = counts.len();
    let a = PayoffMatrix::identity(n);
    let state = ok(PopulationState::new(counts))?;
    let mut rng = trial_rng(seed, 0);
    let mut cur = state;
    for _ in 0..20 {
        let next = step(&cur, &a, eta, &mut rng);
        check(next.size() == cur.size(), || "population size changed".into())?;
        check(next.counts().iter().sum::<u32>() == cur.size(), || "counts do not sum to N".into())?;
        let moved: u32 = cur.counts().iter().zip(next.counts()).map(|(p, q)| p.abs_diff(*q)).sum();
        check(moved == 0 || moved == 2, || format!("{:?} -> {:?}", cur.counts(), next.counts()))?;
        cur = next;
    }
    Ok(())
}

pub fn counts() -> impl Strategy<Value = Vec<u32>> {
    (2usize..5).prop_flat_map(|n| prop::collection::vec(0u32..30, n)).prop_filter("nonempty population", |c| {
        c.iter().sum::<u32>() > 0
    })
}

fn err<T: std::fmt::Debug>(e: proptest::test_runner::TestError<T>) -> String {
    e.to_string()
}

/// Runs every property with `cases` cases; returns `(name, result)` pairs.
pub fn run_all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    let mut out = Vec::new();
    let dims = || 2usize..5;
    out.push((
        "convexity",
        runner(cases)
            .run(
                &dims().prop_flat_map(|n| (game_point(n), tangent(n, 5.0), tangent(n, 5.0), 0.0..1.0f64)),
                |(g, u, v, l)| convexity(g, u, v, l),
            )
            .map_err(err),
    ));
    out.push((
        "fenchel-young",
        runner(cases)
            .run(&dims().prop_flat_map(|n| (game_point(n), tangent(n, 2.0), tangent(n, 1.0))), |(g, u, v)| {
                fenchel_young(g, u, v)
            })
            .map_err(err),
    ));
    out.push((
        "homogeneity",
        runner(cases)
            .run(&dims().prop_flat_map(|n| (game_point(n), tangent(n, 1.0), 0.01..10.0f64)), |(g, d, t)| {
                homogeneity(g, d, t)
            })
            .map_err(err),
    ));
    out.push((
        "subadditivity",
        runner(cases)
            .run(&dims().prop_flat_map(|n| (game_point(n), tangent(n, 1.0), tangent(n, 1.0))), |(g, d1, d2)| {
                subadditivity(g, d1, d2)
            })
            .map_err(err),
    ));
    out.push((
        "softmax shift-invariance",
        runner(cases)
            .run(
                &(prop::collection::vec(-5.0..5.0f64, 2..6), -50.0..50.0f64, 0.01..2.0f64),
                |(pi, s, eta)| softmax_shift(pi, s, eta),
            )
            .map_err(err),
    ));
    out.push((
        "population conservation",
        runner(cases).run(&(counts(), 0.05..2.0f64, any::<u64>()), |(c, eta, seed)| conservation(c, eta, seed)).map_err(err),
    ));
    out
}
