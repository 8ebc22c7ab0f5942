//! Command-line front end: a JSON run configuration, flag overrides, one
//! subcommand per operation, CSV outputs and a run manifest.
//!
//! Exit codes: `0` success, `1` configuration error, `2` numerical failure,
//! `3` a `check-*` subcommand found a violation.

mod config;
mod dispatch;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use config::{parse_config, Command, CostChoice, Overrides, RunConfig};
pub use dispatch::{dispatch, Outcome};
pub use output::{format_num, CSV_COMMENT};

use crate::error::Error;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LOGIT_HJ_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "logit-hj", version, about = "Value functions and checks for logit coordination games")]
pub struct Cli {
    /// Operation to run; overrides `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NumericalFailure(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV}={v} is not a thread count"))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs the operation and returns the process exit code.
/// Diagnostics go to standard error, summaries to standard output.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return EXIT_CONFIG;
    }
    let cfg = match parse_config(cli.command, &cli.overrides) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    match dispatch(&cfg) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            if let Some(w) = &out.worst {
                eprintln!("check failed; worst row: {}", output::check_row(w));
                EXIT_CHECK_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
