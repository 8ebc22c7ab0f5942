use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::experiments::{CheckItem, CheckReport, SweepReport};
use crate::solver::{OptimalPath, ValueField};

use super::config::RunConfig;
use crate::error::{Error, Result};

/// Prefix of comment lines in every CSV file.
pub const CSV_COMMENT: &str = "#";

/// 17 significant digits, enough to round-trip any double.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('"', "\"\""))
}

/// Comment header naming the subcommand and the full parameter set.
pub fn header(cfg: &RunConfig) -> String {
    let echo = serde_json::to_string(cfg).expect("config serializes");
    format!("{CSV_COMMENT} logit-hj {}\n{CSV_COMMENT} config {echo}\n", cfg.command().name())
}

pub struct Writer {
    dir: PathBuf,
    header: String,
    pub files: Vec<String>,
}

impl Writer {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
        Ok(Writer { dir: cfg.out.clone(), header: header(cfg), files: Vec::new() })
    }

    pub fn csv(&mut self, name: &str, notes: &[String], columns: &str, body: &str) -> Result<()> {
        let mut text = self.header.clone();
        for n in notes {
            let _ = writeln!(text, "{CSV_COMMENT} {n}");
        }
        text.push_str(columns);
        text.push('\n');
        text.push_str(body);
        self.write(name, &text)
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

pub fn value_field_columns(n: usize) -> String {
    let ks: Vec<String> = (1..=n).map(|i| format!("k_{i}")).collect();
    format!("{},M,value", ks.join(","))
}

pub fn value_field_body(field: &ValueField) -> String {
    let grid = field.grid();
    let mut s = String::new();
    for node in 0..grid.len() {
        for k in grid.numerators(node) {
            let _ = write!(s, "{k},");
        }
        let _ = writeln!(s, "{},{}", grid.denominator(), format_num(field.value(node)));
    }
    s
}

pub fn path_columns(n: usize) -> String {
    let ks: Vec<String> = (1..=n).map(|i| format!("k_{i}")).collect();
    format!("step,{},segment_cost,cumulative", ks.join(","))
}

pub fn path_body(field: &ValueField, path: &OptimalPath) -> String {
    let mut s = String::new();
    let mut cumulative = 0.0;
    for (step, &node) in path.nodes.iter().enumerate() {
        let seg = if step == 0 { 0.0 } else { path.segment_costs[step - 1] };
        cumulative += seg;
        let ks: Vec<String> = field.grid().numerators(node).iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "{step},{},{},{}", ks.join(","), format_num(seg), format_num(cumulative));
    }
    s
}

pub const SWEEP_COLUMNS: &str = "parameter,gap,tolerance,pass,wall_time_ms";
pub const CHECK_COLUMNS: &str = "label,value,bound,pass";

pub fn sweep_body(rep: &SweepReport) -> String {
    let mut s = String::new();
    for r in &rep.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_num(r.parameter),
            format_num(r.gap),
            format_num(r.tolerance),
            r.pass,
            format_num(r.wall_time_ms)
        );
    }
    s
}

pub fn check_row(c: &CheckItem) -> String {
    format!("{},{},{},{}", quote(&c.label), format_num(c.value), format_num(c.bound), c.pass)
}

pub fn check_body(items: &[CheckItem]) -> String {
    items.iter().map(|c| check_row(c) + "\n").collect()
}

pub fn check_summary(rep: &CheckReport) -> String {
    let failed = rep.failures().count();
    format!("{}: {} items, {failed} failed", rep.name, rep.items.len())
}
