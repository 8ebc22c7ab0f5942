use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::PayoffMatrix;
use crate::hamiltonian::{CostKind, RaySolverConfig};
use crate::solver::SolveConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveTarget,
    SolveSource,
    Path,
    ClosedForm,
    SweepEta,
    SweepR,
    CoupledLimit,
    CheckInclusion,
    CheckBarrier,
    CheckBlowup,
    CheckCorner,
    ProbeNoncoercive,
    Simulate,
    Levelset,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SolveTarget => "solve-target",
            Command::SolveSource => "solve-source",
            Command::Path => "path",
            Command::ClosedForm => "closed-form",
            Command::SweepEta => "sweep-eta",
            Command::SweepR => "sweep-r",
            Command::CoupledLimit => "coupled-limit",
            Command::CheckInclusion => "check-inclusion",
            Command::CheckBarrier => "check-barrier",
            Command::CheckBlowup => "check-blowup",
            Command::CheckCorner => "check-corner",
            Command::ProbeNoncoercive => "probe-noncoercive",
            Command::Simulate => "simulate",
            Command::Levelset => "levelset",
        }
    }

    pub fn is_check(self) -> bool {
        matches!(
            self,
            Command::CheckInclusion
                | Command::CheckBarrier
                | Command::CheckBlowup
                | Command::CheckCorner
                | Command::ProbeNoncoercive
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CostChoice {
    Limit,
    Eta,
}

/// Fully materialized run configuration. Every field has a default, so a
/// config file only needs the fields it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub payoff: PayoffMatrix,
    /// Number of actions; must match the payoff matrix when given.
    pub n: Option<usize>,
    pub m: u32,
    /// Boundary floor of the grid, a multiple of `1/m`.
    pub r: f64,
    pub cost: CostChoice,
    pub eta: Option<f64>,
    pub etas: Vec<f64>,
    pub rs: Vec<f64>,
    /// `(eta, r)` schedule for `coupled-limit`.
    pub pairs: Vec<(f64, f64)>,
    pub theta: f64,
    pub delta: f64,
    pub samples: usize,
    /// Point for `levelset`, start point for `path`.
    pub x: Option<Vec<f64>>,
    /// Source nodes for `solve-source`, as lattice numerators.
    pub sources: Option<Vec<Vec<u32>>>,
    pub min_coord: f64,
    pub levels: Vec<f64>,
    pub per_level: usize,
    pub seed: u64,
    pub s_values: Vec<f64>,
    pub populations: Vec<u32>,
    pub trials: u64,
    pub max_steps: u64,
    pub points: usize,
    pub out: PathBuf,
    pub ray: RaySolverConfig,
    pub allow_boundary: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            payoff: PayoffMatrix::identity(2),
            n: None,
            m: 60,
            r: 0.0,
            cost: CostChoice::Limit,
            eta: None,
            etas: vec![0.4, 0.2, 0.1, 0.05],
            rs: vec![0.2, 0.1, 0.05],
            pairs: vec![(0.2, 0.2), (0.1, 0.1), (0.05, 0.05)],
            theta: 0.9,
            delta: 0.05,
            samples: 500,
            x: None,
            sources: None,
            min_coord: 0.2,
            levels: vec![0.2, 0.1, 0.05, 0.02],
            per_level: 25,
            seed: 1,
            s_values: vec![1.0, 10.0, 100.0, 1000.0],
            populations: vec![20, 40, 80],
            trials: 200,
            max_steps: 1 << 40,
            points: 201,
            out: PathBuf::from("out"),
            ray: RaySolverConfig::default(),
            allow_boundary: false,
        }
    }
}

impl RunConfig {
    pub fn command(&self) -> Command {
        self.command.expect("validated config has a command")
    }

    pub fn cost_kind(&self) -> Result<CostKind, ConfigError> {
        match self.cost {
            CostChoice::Limit => Ok(CostKind::Limit),
            CostChoice::Eta => self
                .eta
                .map(CostKind::Eta)
                .ok_or_else(|| ConfigError::Invalid("cost = eta needs a value for eta".into())),
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig { ray: self.ray, allow_boundary: self.allow_boundary }
    }

    /// Checks every field that does not depend on the subcommand's output.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.command.is_none() {
            return bad("no command given on the command line or in the config".into());
        }
        self.payoff.validate_coordination().map_err(|e| ConfigError::Invalid(format!("payoff: {e}")))?;
        if let Some(n) = self.n {
            if n != self.payoff.n() {
                return bad(format!("n = {n} but the payoff matrix has {} actions", self.payoff.n()));
            }
        }
        if self.m == 0 {
            return bad("m must be positive".into());
        }
        self.lattice("r", self.r)?;
        let cmd = self.command();
        if matches!(cmd, Command::SweepR | Command::CheckCorner) {
            for &r in &self.rs {
                self.lattice("rs", r)?;
            }
        }
        if cmd == Command::CoupledLimit {
            for &(eta, r) in &self.pairs {
                positive("pairs eta", eta)?;
                self.lattice("pairs r", r)?;
            }
        }
        if let Some(eta) = self.eta {
            positive("eta", eta)?;
        }
        for &eta in &self.etas {
            positive("etas", eta)?;
        }
        self.cost_kind()?;
        self.ray.validate().map_err(|e| ConfigError::Invalid(format!("ray: {e}")))?;
        if let Some(x) = &self.x {
            if x.len() != self.payoff.n() {
                return bad(format!("x has {} coordinates, expected {}", x.len(), self.payoff.n()));
            }
        }
        if !(self.delta >= 0.0) || !(self.min_coord >= 0.0) {
            return bad("delta and min_coord must be nonnegative".into());
        }
        Ok(())
    }

    fn lattice(&self, field: &str, r: f64) -> Result<(), ConfigError> {
        let k = r * self.m as f64;
        if !(r >= 0.0) || (k - k.round()).abs() > 1e-9 {
            return Err(ConfigError::Invalid(format!("{field}: r = {r} is not a multiple of 1/{}", self.m)));
        }
        Ok(())
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{field}: {v} must be positive")))
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Flags that override fields of the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Payoff matrix as JSON rows, e.g. `[[1,0],[0,1]]`.
    #[arg(long)]
    pub payoff: Option<String>,
    /// Use the n×n identity payoff matrix.
    #[arg(long, conflicts_with = "payoff")]
    pub identity: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid denominator.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_enum)]
    pub cost: Option<CostChoice>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub rs: Option<Vec<f64>>,
    /// Schedule as `eta:r` pairs, e.g. `0.2:0.2,0.1:0.1`.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub pairs: Option<Vec<(f64, f64)>>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// One source node as lattice numerators; repeat for more.
    #[arg(long = "source", value_delimiter = ',', num_args = 1, action = clap::ArgAction::Append)]
    pub source: Option<Vec<u32>>,
    #[arg(long)]
    pub min_coord: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long)]
    pub per_level: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub s_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub populations: Option<Vec<u32>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub allow_boundary: bool,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub bisect_tol: Option<f64>,
    #[arg(long)]
    pub dir_samples: Option<usize>,
    #[arg(long)]
    pub newton_max_iter: Option<usize>,
    #[arg(long)]
    pub newton_tol: Option<f64>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("`{s}` is not of the form eta:r"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &str, text: &str) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Loads the config file (if any), applies flag overrides and validates.
/// The returned value has every default filled in.
pub fn parse_config(command: Option<Command>, o: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
            parse_json::<RunConfig>(&path.display().to_string(), &text)?
        }
        None => RunConfig::default(),
    };
    if command.is_some() {
        cfg.command = command;
    }
    if let Some(p) = &o.payoff {
        let rows: Vec<Vec<f64>> = parse_json("--payoff", p)?;
        cfg.payoff = PayoffMatrix::from_rows(rows).map_err(|e| ConfigError::Invalid(format!("--payoff: {e}")))?;
    }
    if let Some(n) = o.identity {
        if n < 2 {
            return Err(ConfigError::Invalid("--identity needs at least 2 actions".into()));
        }
        cfg.payoff = PayoffMatrix::identity(n);
    }
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = &o.$f { cfg.$f = v.clone(); } )* };
    }
    set!(out, m, r, cost, etas, rs, pairs, theta, delta, samples, min_coord, levels, per_level, seed, s_values);
    set!(populations, trials, max_steps, points);
    if o.n.is_some() {
        cfg.n = o.n;
    }
    if o.eta.is_some() {
        cfg.eta = o.eta;
    }
    if o.x.is_some() {
        cfg.x = o.x.clone();
    }
    if let Some(flat) = &o.source {
        let n = cfg.payoff.n();
        if flat.len() % n != 0 {
            return Err(ConfigError::Invalid(format!("--source needs {n} numerators per node")));
        }
        cfg.sources = Some(flat.chunks(n).map(|c| c.to_vec()).collect());
    }
    if o.allow_boundary {
        cfg.allow_boundary = true;
    }
    if let Some(v) = o.t_max {
        cfg.ray.t_max = v;
    }
    if let Some(v) = o.bisect_tol {
        cfg.ray.bisect_tol = v;
    }
    if let Some(v) = o.dir_samples {
        cfg.ray.dir_samples = v;
    }
    if let Some(v) = o.newton_max_iter {
        cfg.ray.newton_max_iter = v;
    }
    if let Some(v) = o.newton_tol {
        cfg.ray.newton_tol = v;
    }
    if cfg.n.is_none() {
        cfg.n = Some(cfg.payoff.n());
    }
    cfg.validate()?;
    Ok(cfg)
}
