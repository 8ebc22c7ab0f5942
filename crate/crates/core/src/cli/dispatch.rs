use std::sync::Arc;
use std::time::Instant;

use serde_json::json;

use super::config::{Command, RunConfig};
use super::output::{self, format_num, Writer, CHECK_COLUMNS, SWEEP_COLUMNS};
use crate::closedform::{delta_eta, v_eta_1d, v_limit_1d, TwoActionGame};
use crate::error::{invalid, Error, Result};
use crate::experiments::{
    barrier_check, blowup_check, blowup_points, corner_cost_check, coupled_limit, delta_bar, eta_ceiling,
    inclusion_check, levelset_polygon, noncoercivity_probe, sample_outside_d, sweep_eta_full, sweep_eta_restricted,
    sweep_r, BarrierParams, CheckItem, CheckReport, Compact, InclusionParams, SweepReport,
};
use crate::geometry::{BarycentricGrid, SimplexPoint};
use crate::hamiltonian::CostKind;
use crate::mcsim::estimate_exit_stats;
use crate::solver::{reconstruct_path, solve_source, solve_target, ValueField};

/// What a run produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    /// Files written to the output directory, manifest last.
    pub files: Vec<String>,
    /// Human-readable lines for standard output.
    pub summary: Vec<String>,
    /// Worst failing item of a `check-*` subcommand.
    pub worst: Option<CheckItem>,
}

fn need_eta(cfg: &RunConfig) -> Result<f64> {
    cfg.eta.ok_or_else(|| Error::InvalidInput(format!("{} needs eta", cfg.command().name())))
}

fn grid(cfg: &RunConfig) -> Result<Arc<BarycentricGrid>> {
    Ok(Arc::new(BarycentricGrid::new(cfg.payoff.n(), cfg.m, cfg.r)?))
}

fn limit_field(cfg: &RunConfig) -> Result<ValueField> {
    solve_target(grid(cfg)?, &cfg.payoff, CostKind::Limit, &cfg.solve_config())
}

/// Largest `η` meeting the inclusion regime over the given nodes.
fn regime_eta(cfg: &RunConfig, v_r: &ValueField, samples: usize) -> Result<f64> {
    let nodes = sample_outside_d(&cfg.payoff, v_r, cfg.delta, samples);
    if nodes.is_empty() {
        return invalid("no grid node of B^1 has a value above delta");
    }
    let dbar = delta_bar(&cfg.payoff, v_r.grid(), &nodes);
    Ok(eta_ceiling(cfg.r, cfg.theta, dbar))
}

/// Runs the configured subcommand, writing its CSV files and `manifest.json`
/// into the output directory.
pub fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let mut cfg = cfg.clone();
    let cmd = cfg.command();
    let a = cfg.payoff.clone();
    let scfg = cfg.solve_config();
    let mut summary = Vec::new();
    let mut reports: Vec<CheckReport> = Vec::new();

    // Subcommands whose η default depends on a solve fix it before the
    // header is written, so the echoed config is the one actually run.
    let mut pre_field = None;
    if matches!(cmd, Command::CheckInclusion | Command::CheckBarrier) {
        if cfg.r <= 0.0 {
            return invalid("inclusion and barrier checks need r > 0");
        }
        let v_r = limit_field(&cfg)?;
        if cfg.eta.is_none() {
            let samples = if cmd == Command::CheckBarrier { usize::MAX } else { cfg.samples };
            cfg.eta = Some(regime_eta(&cfg, &v_r, samples)?);
        }
        pre_field = Some(v_r);
    }
    let mut w = Writer::new(&cfg)?;
    let n = a.n();

    match cmd {
        Command::SolveTarget | Command::SolveSource => {
            let g = grid(&cfg)?;
            let field = if cmd == Command::SolveTarget {
                solve_target(g, &a, cfg.cost_kind().map_err(cfg_err)?, &scfg)?
            } else {
                let seeds = match &cfg.sources {
                    Some(list) => list
                        .iter()
                        .map(|k| g.index_of(k).ok_or_else(|| Error::InvalidInput(format!("source {k:?} is not a grid node"))))
                        .collect::<Result<Vec<_>>>()?,
                    None => vec![g.corner(0)],
                };
                solve_source(g, &a, &seeds, cfg.cost_kind().map_err(cfg_err)?, &scfg)?
            };
            w.csv("value_field.csv", &[], &output::value_field_columns(n), &output::value_field_body(&field))?;
            summary.push(format!("{} nodes, max finite value {}", field.grid().len(), format_num(field.max_finite())));
        }
        Command::Path => {
            let field = solve_target(grid(&cfg)?, &a, cfg.cost_kind().map_err(cfg_err)?, &scfg)?;
            let start_node = match &cfg.x {
                Some(x) => field.grid().nearest(&SimplexPoint::new(x.clone())?),
                None => field.grid().corner(0),
            };
            let path = reconstruct_path(&field, start_node)?;
            w.csv("path.csv", &[], &output::path_columns(n), &output::path_body(&field, &path))?;
            summary.push(format!("{} steps, total cost {}", path.nodes.len() - 1, format_num(path.total)));
        }
        Command::ClosedForm => {
            let g = TwoActionGame::from_payoff(&a)?;
            if cfg.points < 2 {
                return invalid("closed-form needs at least 2 points");
            }
            let mut notes = Vec::new();
            if let Some(eta) = cfg.eta {
                notes.push(format!("delta_eta={}", format_num(delta_eta(&g, eta)?)));
            }
            let mut body = String::new();
            for k in 0..cfg.points {
                let x1 = k as f64 / (cfg.points - 1) as f64;
                body.push_str(&format!("{},{}", format_num(x1), format_num(v_limit_1d(&g, x1))));
                if let Some(eta) = cfg.eta {
                    body.push_str(&format!(",{}", format_num(v_eta_1d(&g, eta, x1)?)));
                }
                body.push('\n');
            }
            let columns = if cfg.eta.is_some() { "x1,v,v_eta" } else { "x1,v" };
            w.csv("closed_form.csv", &notes, columns, &body)?;
            summary.extend(notes);
        }
        Command::SweepEta | Command::SweepR | Command::CoupledLimit => {
            let compact = Compact { min_coord: cfg.min_coord };
            let rep = match cmd {
                Command::SweepEta if cfg.r > 0.0 => sweep_eta_restricted(&a, cfg.r, cfg.m, &cfg.etas, &scfg)?,
                Command::SweepEta => sweep_eta_full(&a, cfg.m, &cfg.etas, &scfg)?,
                Command::SweepR => sweep_r(&a, cfg.m, &cfg.rs, compact, &scfg)?,
                _ => coupled_limit(&a, cfg.m, &cfg.pairs, compact, &scfg)?,
            };
            write_sweep(&mut w, &rep)?;
            summary.push(format!("{}: {}", rep.name, if rep.pass() { "pass" } else { "FAIL" }));
            for r in &rep.rows {
                summary.push(format!("  {}={} gap={:.6e} tol={:.6e} {}", rep.parameter, r.parameter, r.gap, r.tolerance, pf(r.pass)));
            }
        }
        Command::CheckInclusion => {
            let v_r = pre_field.take().expect("solved above");
            let p = InclusionParams { r: cfg.r, eta: need_eta(&cfg)?, theta: cfg.theta, delta: cfg.delta, samples: cfg.samples };
            reports.push(inclusion_check(&a, &v_r, &p)?);
        }
        Command::CheckBarrier => {
            let v_r = pre_field.take().expect("solved above");
            let v_eta = solve_target(grid(&cfg)?, &a, CostKind::Eta(need_eta(&cfg)?), &scfg)?;
            reports.push(barrier_check(&v_r, &v_eta, &BarrierParams { theta: cfg.theta, delta: cfg.delta })?);
        }
        Command::CheckBlowup => {
            let points = blowup_points(n, cfg.per_level, &cfg.levels, cfg.seed)?;
            for &eta in &cfg.etas {
                let mut rep = blowup_check(&a, eta, &points, &cfg.ray)?;
                for item in &mut rep.items {
                    item.label = format!("eta={eta} {}", item.label);
                }
                reports.push(rep);
            }
        }
        Command::CheckCorner => reports.push(corner_cost_check(&a, need_eta(&cfg)?, &cfg.rs, cfg.m, &scfg)?),
        Command::ProbeNoncoercive => {
            for &eta in &cfg.etas {
                let mut rep = noncoercivity_probe(&a, eta, &cfg.s_values)?;
                for item in &mut rep.items {
                    item.label = format!("eta={eta} {}", item.label);
                }
                reports.push(rep);
            }
        }
        Command::Simulate => {
            let eta = need_eta(&cfg)?;
            let stats = estimate_exit_stats(&a, &cfg.populations, eta, cfg.trials, cfg.seed, cfg.max_steps)?;
            let mut trials = String::new();
            let mut table = String::new();
            let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), format_num);
            for s in &stats {
                for (t, o) in s.outcomes.iter().enumerate() {
                    trials.push_str(&format!("{t},{},{},{},{}\n", s.population, format_num(eta), o.steps(), o.is_censored()));
                }
                table.push_str(&format!("{},{},{},{},{},{}\n", s.population, s.trials, s.censored, opt(s.mean), opt(s.median), opt(s.p90)));
                summary.push(format!("N={} median={} censored={}", s.population, opt(s.median), s.censored));
            }
            w.csv("trials.csv", &[], "trial,N,eta,hit_steps,censored", &trials)?;
            w.csv("summary.csv", &[], "N,trials,censored,mean,median,p90", &table)?;
        }
        Command::Levelset => {
            let x = SimplexPoint::new(cfg.x.clone().ok_or_else(|| Error::InvalidInput("levelset needs x".into()))?)?;
            let ls = levelset_polygon(&a, need_eta(&cfg)?, &x, cfg.ray.dir_samples, &cfg.ray)?;
            let cs: Vec<String> = (1..n).map(|i| format!("c_{i}")).collect();
            let mut body = String::new();
            for (set, pts) in [("limit", &ls.limit), ("eta", &ls.eta)] {
                for (i, p) in pts.iter().enumerate() {
                    let coords: Vec<String> = p.iter().map(|&c| format_num(c)).collect();
                    body.push_str(&format!("{set},{i},{}\n", coords.join(",")));
                }
            }
            w.csv("levelset.csv", &[], &format!("set,index,{}", cs.join(",")), &body)?;
            summary.push(format!("{} limit vertices, {} eta boundary points", ls.limit.len(), ls.eta.len()));
        }
    }

    let mut worst = None;
    if !reports.is_empty() {
        let items: Vec<CheckItem> = reports.iter().flat_map(|r| r.items.iter().cloned()).collect();
        let notes: Vec<String> = reports.iter().flat_map(|r| r.notes.iter().cloned()).collect();
        w.csv("check.csv", &notes, CHECK_COLUMNS, &output::check_body(&items))?;
        for r in &reports {
            summary.push(output::check_summary(r));
        }
        worst = reports.iter().filter_map(|r| r.worst()).max_by(|x, y| excess(x).total_cmp(&excess(y))).cloned();
        debug_assert!(cmd.is_check());
    }

    let manifest = json!({
        "command": cmd.name(),
        "config": cfg,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": start.elapsed().as_secs_f64() * 1e3,
        "files": w.files,
    });
    w.write("manifest.json", &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    Ok(Outcome { files: w.files, summary, worst })
}

fn excess(c: &CheckItem) -> f64 {
    (c.value - c.bound).abs()
}

fn pf(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn cfg_err(e: super::config::ConfigError) -> Error {
    Error::InvalidInput(e.to_string())
}

fn write_sweep(w: &mut Writer, rep: &SweepReport) -> Result<()> {
    w.csv("sweep.csv", &rep.notes, SWEEP_COLUMNS, &output::sweep_body(rep))?;
    if !rep.checks.is_empty() {
        w.csv("checks.csv", &rep.notes, CHECK_COLUMNS, &output::check_body(&rep.checks))?;
    }
    Ok(())
}
