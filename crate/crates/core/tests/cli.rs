use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logit-hj"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("LOGIT_HJ_THREADS", "1")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn config_file(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn demo_config_writes_201_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let demo = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/two_action_demo.json");
    let out = run(&["--config", demo], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "value_field.csv");
    assert!(csv.starts_with("# logit-hj solve-target\n# config {"));
    assert_eq!(data_rows(&csv).len(), 201);
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "solve-target");
    assert_eq!(manifest["config"]["m"], 200);
    assert!(manifest["wall_time_ms"].as_f64().unwrap() >= 0.0);
    assert!(manifest["version"].is_string());
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(dir.path(), r#"{"payoff": [[1,0,0],[0,1,0],[0,0,1]], "m": 60, "r": 0.07}"#);
    let out = run(&["solve-target", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a multiple of 1/60"));

    let out = run(&["solve-target", "--payoff", "[[1,0],[2,1]]"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A[1][0]"));

    let cfg = config_file(dir.path(), "{\n  \"m\": 60,\n  \"mm\": 1\n}");
    let out = run(&["solve-target", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cfg.json:3:"));

    let out = run(&["solve-target", "--cost", "eta"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // No plateau threshold exists at this noise level.
    let out = run(&["closed-form", "--eta", "5"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(&["check-barrier", "--identity", "3", "--m", "30", "--r", "0.1"], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let csv = read(dir.path(), "check.csv");
    assert!(csv.starts_with("# logit-hj check-barrier\n"));
    assert!(data_rows(&csv).iter().all(|r| r.ends_with(",true")));

    // A large noise level with θ close to 1 and δ = 0 breaks the barrier.
    let bad = run(
        &["check-barrier", "--identity", "3", "--m", "60", "--r", "0.1", "--eta", "0.4", "--theta", "0.99", "--delta", "0"],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(3));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("worst row: \"V^eta_r >= phi - 4/M"), "{err}");
}

#[test]
fn identical_config_gives_identical_bytes() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (args, file) in [
        (vec!["solve-target", "--identity", "3", "--m", "30", "--r", "0.1", "--cost", "eta", "--eta", "0.1"], "value_field.csv"),
        (vec!["path", "--identity", "3", "--m", "30"], "path.csv"),
        (vec!["simulate", "--eta", "0.3", "--populations", "10,20", "--trials", "50"], "trials.csv"),
        (vec!["check-blowup", "--identity", "3", "--etas", "0.1"], "check.csv"),
    ] {
        // Output directories differ, and the header echoes them; compare the rest.
        let strip = |dir: &Path| {
            let text = read(dir, file);
            let out = dir.display().to_string();
            text.replace(&out, "OUT")
        };
        assert_eq!(run(&args, d1.path()).status.code(), Some(0));
        assert_eq!(run(&args, d2.path()).status.code(), Some(0));
        assert_eq!(strip(d1.path()), strip(d2.path()), "{file}");
    }
}

#[test]
fn sweeps_match_apart_from_wall_time() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["sweep-eta", "--identity", "2", "--m", "40", "--r", "0.1", "--etas", "0.2,0.1"];
    assert_eq!(run(&args, d1.path()).status.code(), Some(0));
    assert_eq!(run(&args, d2.path()).status.code(), Some(0));
    let rows = |d: &Path| -> Vec<String> {
        data_rows(&read(d, "sweep.csv")).iter().map(|r| r.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    assert_eq!(rows(d1.path()), rows(d2.path()));
    assert_eq!(rows(d1.path()).len(), 2);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve-source", "--m", "20"],
        vec!["closed-form", "--eta", "0.1"],
        vec!["sweep-r", "--identity", "3", "--m", "20"],
        vec!["coupled-limit", "--identity", "3", "--m", "20"],
        vec!["check-inclusion", "--identity", "3", "--m", "60", "--r", "0.1", "--samples", "20"],
        vec!["check-corner", "--identity", "3", "--m", "40", "--eta", "0.1", "--rs", "0.2,0.1"],
        vec!["probe-noncoercive", "--identity", "3"],
        vec!["levelset", "--identity", "3", "--eta", "0.1", "--x", "0.5,0.3,0.2", "--dir-samples", "36"],
    ];
    for args in cases {
        let out = run(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            assert!(std::fs::read_to_string(&p).unwrap().starts_with("# logit-hj "), "{}", p.display());
        }
    }
}
