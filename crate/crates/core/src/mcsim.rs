//! Agent-based simulation of the logit revision chain with `N` agents.
//!
//! Each step one agent, chosen uniformly, revises and draws its new action
//! from `σ^η(Ax)` at the current state (the reviser counts itself).
//!
//! Hitting times are sampled exactly in distribution without replaying every
//! revision. In general, runs of null revisions are skipped with one
//! geometric draw. With two actions the chain is a birth-death walk on the
//! number `k` of second-action players, and the whole passage to the target
//! level is drawn level by level: the number of down-jumps out of level `k`
//! given `D` down-jumps out of level `k+1` is negative binomial with `D+1`
//! successes, and the waiting revisions at each level are negative binomial
//! in the number of visits.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Geometric, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{in_target_z_lattice, PayoffMatrix};
use crate::geometry::SimplexPoint;

/// Agent counts per action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PopulationState {
    counts: Vec<u32>,
}

impl PopulationState {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.len() < 2 {
            return invalid("population needs at least two actions");
        }
        if counts.iter().all(|&c| c == 0) {
            return invalid("population is empty");
        }
        Ok(PopulationState { counts })
    }

    /// Everyone plays `action`.
    pub fn monomorphic(n: usize, size: u32, action: usize) -> Self {
        let mut counts = vec![0; n];
        counts[action] = size;
        PopulationState { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn point(&self) -> SimplexPoint {
        SimplexPoint::from_weights(&self.counts.iter().map(|&c| c as f64).collect::<Vec<_>>())
            .expect("nonempty population")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub population: u32,
    pub eta: f64,
    pub seed: u64,
    pub max_steps: u64,
    pub start: PopulationState,
}

impl SimConfig {
    pub fn validate(&self, a: &PayoffMatrix) -> Result<()> {
        if self.population < 2 {
            return invalid("population size must be at least 2");
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return invalid("eta must be positive");
        }
        if self.start.counts.len() != a.n() {
            return invalid("start state has the wrong number of actions");
        }
        if self.start.size() != self.population {
            return invalid(format!("start state has {} agents, expected {}", self.start.size(), self.population));
        }
        Ok(())
    }
}

/// Stable softmax `σ^η(π)`.
pub fn logit_choice(pi: &[f64], eta: f64) -> Vec<f64> {
    let max = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = pi.iter().map(|p| ((p - max) / eta).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

fn choice_probs(state: &PopulationState, a: &PayoffMatrix, eta: f64) -> Vec<f64> {
    let size = state.size() as f64;
    let x: Vec<f64> = state.counts.iter().map(|&c| c as f64 / size).collect();
    logit_choice(&a.payoff_vector(&x), eta)
}

fn draw_index(weights: &[f64], total: f64, rng: &mut impl Rng) -> usize {
    let mut target = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if target < *w {
            return i;
        }
        target -= w;
    }
    // Rounding left a sliver: take the last positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// One revision: a uniformly drawn agent switches to an action drawn from
/// the logit choice at the current state (possibly its own).
pub fn step(state: &PopulationState, a: &PayoffMatrix, eta: f64, rng: &mut impl Rng) -> PopulationState {
    let counts: Vec<f64> = state.counts.iter().map(|&c| c as f64).collect();
    let from = draw_index(&counts, state.size() as f64, rng);
    let probs = choice_probs(state, a, eta);
    let to = draw_index(&probs, 1.0, rng);
    let mut next = state.clone();
    next.counts[from] -= 1;
    next.counts[to] += 1;
    next
}

/// RNG for trial `trial` of a seeded experiment.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HitOutcome {
    Hit(u64),
    /// No hit within the step budget.
    Timeout(u64),
}

impl HitOutcome {
    pub fn steps(&self) -> u64 {
        match self {
            HitOutcome::Hit(s) | HitOutcome::Timeout(s) => *s,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, HitOutcome::Timeout(_))
    }
}

/// Jump law at a state: chance that a revision changes the state, and the
/// weights of the changing `(from, to)` pairs.
struct Jumps {
    move_prob: f64,
    pairs: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

fn jumps(state: &PopulationState, a: &PayoffMatrix, eta: f64) -> Jumps {
    let size = state.size() as f64;
    let probs = choice_probs(state, a, eta);
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for (i, &c) in state.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (j, p) in probs.iter().enumerate() {
            if i != j {
                pairs.push((i, j));
                weights.push(c as f64 / size * p);
            }
        }
    }
    Jumps { move_prob: weights.iter().sum(), pairs, weights }
}

fn hitting_with(cfg: &SimConfig, a: &PayoffMatrix, rng: &mut ChaCha8Rng) -> Result<HitOutcome> {
    cfg.validate(a)?;
    if in_target_z_lattice(a, &cfg.start.counts) {
        return invalid("start state already lies in Z");
    }
    if a.n() == 2 {
        birth_death_hitting(cfg, a, rng)
    } else {
        jump_chain_hitting(cfg, a, rng)
    }
}

/// Failures before the `r`-th success with success probability `p`.
fn negative_binomial(r: u64, p: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
    if r == 0 || p >= 1.0 {
        return Ok(0);
    }
    if p <= 0.0 {
        return Err(Error::NumericalFailure("negative binomial with zero success probability".into()));
    }
    let gamma = Gamma::new(r as f64, (1.0 - p) / p).map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let lambda: f64 = gamma.sample(rng);
    if !(lambda > 0.0) {
        return Ok(0);
    }
    let poisson = Poisson::new(lambda).map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let draw: f64 = poisson.sample(rng);
    Ok(draw.min(u64::MAX as f64) as u64)
}

fn birth_death_hitting(cfg: &SimConfig, a: &PayoffMatrix, rng: &mut ChaCha8Rng) -> Result<HitOutcome> {
    let n = cfg.population;
    let start = cfg.start.counts[1];
    let target = (start..=n).find(|&k| in_target_z_lattice(a, &[n - k, k])).expect("the second vertex is in Z");
    // Levels start..target-1; down-jumps below `start` are counted from the
    // level above as for any other level.
    let mut total = 0u64;
    let mut down_above = 0u64;
    for k in (0..target).rev() {
        let state = PopulationState { counts: vec![n - k, k] };
        let jump = jumps(&state, a, cfg.eta);
        let up: f64 = jump.pairs.iter().zip(&jump.weights).filter(|(p, _)| p.1 == 1).map(|(_, w)| w).sum();
        // Departures upward: one more than the returns from above, except
        // below the start, where the walk only goes up if it came down.
        let ups = if k >= start { down_above + 1 } else { down_above };
        if ups == 0 {
            break;
        }
        let downs = negative_binomial(ups, up / jump.move_prob, rng)?;
        let visits = ups + downs;
        let waits = negative_binomial(visits, jump.move_prob, rng)?;
        total = total.saturating_add(visits).saturating_add(waits);
        if total > cfg.max_steps {
            return Ok(HitOutcome::Timeout(cfg.max_steps));
        }
        down_above = downs;
    }
    Ok(HitOutcome::Hit(total))
}

fn jump_chain_hitting(cfg: &SimConfig, a: &PayoffMatrix, rng: &mut ChaCha8Rng) -> Result<HitOutcome> {
    let mut cache: HashMap<Vec<u32>, Jumps> = HashMap::new();
    let mut state = cfg.start.clone();
    let mut steps = 0u64;
    loop {
        let jump = cache.entry(state.counts.clone()).or_insert_with(|| jumps(&state, a, cfg.eta));
        let wait = if jump.move_prob >= 1.0 {
            1
        } else if jump.move_prob <= 0.0 {
            return Ok(HitOutcome::Timeout(cfg.max_steps));
        } else {
            let geo = Geometric::new(jump.move_prob).map_err(|e| Error::NumericalFailure(e.to_string()))?;
            geo.sample(rng).saturating_add(1)
        };
        steps = steps.saturating_add(wait);
        if steps > cfg.max_steps {
            return Ok(HitOutcome::Timeout(cfg.max_steps));
        }
        let (from, to) = jump.pairs[draw_index(&jump.weights, jump.move_prob, rng)];
        state.counts[from] -= 1;
        state.counts[to] += 1;
        if in_target_z_lattice(a, &state.counts) {
            return Ok(HitOutcome::Hit(steps));
        }
    }
}

/// Revisions until the state enters `Z`, using RNG stream 0 of `cfg.seed`.
pub fn run_hitting(cfg: &SimConfig, a: &PayoffMatrix) -> Result<HitOutcome> {
    hitting_with(cfg, a, &mut trial_rng(cfg.seed, 0))
}

/// Hitting times of independent trials; trial `t` uses stream `t`.
pub fn run_trials(cfg: &SimConfig, a: &PayoffMatrix, trials: u64) -> Result<Vec<HitOutcome>> {
    (0..trials).into_par_iter().map(|t| hitting_with(cfg, a, &mut trial_rng(cfg.seed, t))).collect()
}

/// Summary of hitting steps for one population size. Statistics are over
/// uncensored trials and are `None` when every trial timed out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitStats {
    pub population: u32,
    pub trials: u64,
    pub censored: u64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub p90: Option<f64>,
    pub outcomes: Vec<HitOutcome>,
}

fn quantile(sorted: &[u64], q: f64) -> f64 {
    // Linear interpolation between order statistics.
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] as f64 * (1.0 - frac) + sorted[hi] as f64 * frac
}

/// Exit statistics from the all-first-action state for each population size.
pub fn estimate_exit_stats(
    a: &PayoffMatrix,
    populations: &[u32],
    eta: f64,
    trials: u64,
    seed: u64,
    max_steps: u64,
) -> Result<Vec<ExitStats>> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    populations
        .iter()
        .map(|&n| {
            let cfg = SimConfig {
                population: n,
                eta,
                seed,
                max_steps,
                start: PopulationState::monomorphic(a.n(), n, 0),
            };
            let outcomes = run_trials(&cfg, a, trials)?;
            let mut hits: Vec<u64> = outcomes.iter().filter(|o| !o.is_censored()).map(|o| o.steps()).collect();
            hits.sort_unstable();
            let censored = trials - hits.len() as u64;
            let (mean, median, p90) = if hits.is_empty() {
                (None, None, None)
            } else {
                let mean = hits.iter().map(|&h| h as f64).sum::<f64>() / hits.len() as f64;
                (Some(mean), Some(quantile(&hits, 0.5)), Some(quantile(&hits, 0.9)))
            };
            Ok(ExitStats { population: n, trials, censored, mean, median, p90, outcomes })
        })
        .collect()
}
