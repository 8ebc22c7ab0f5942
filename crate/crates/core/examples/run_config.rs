//! Running a subcommand from a JSON configuration, as the `logit-hj` binary
//! does. Writes into a temporary directory and prints the files produced.
//!
//! ```text
//! cargo run --example run_config -- examples/configs/two_action_demo.json
//! ```

use logit_hj::cli::{dispatch, parse_config, Overrides};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "examples/configs/two_action_demo.json".into());
    let out = std::env::temp_dir().join("logit-hj-run-config");
    let o = Overrides { config: Some(path.into()), out: Some(out.clone()), ..Default::default() };
    let cfg = match parse_config(None, &o) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    match dispatch(&cfg) {
        Ok(outcome) => {
            for line in outcome.summary {
                println!("{line}");
            }
            for f in outcome.files {
                println!("wrote {}", out.join(f).display());
            }
        }
        Err(e) => eprintln!("{e}"),
    }
}
