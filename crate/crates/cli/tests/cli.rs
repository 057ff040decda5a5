//! End-to-end tests of the command-line interface: wire formats, the
//! stdin pipeline convention, caching, idempotence and exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn nbhd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nbhd"))
}

fn run_in(dir: &TempDir, args: &[&str]) -> Output {
    nbhd()
        .current_dir(dir.path())
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_stdin(dir: &TempDir, args: &[&str], input: &str) -> Output {
    let mut child = nbhd()
        .current_dir(dir.path())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn build_complete_piped_into_homology_gives_a_sphere() {
    let dir = TempDir::new().unwrap();
    let k4 = run_in(&dir, &["build", "complete", "4"]);
    let graph = stdout_json(&k4);
    assert_eq!(graph["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(graph["edges"].as_array().unwrap().len(), 6);

    let hom = run_with_stdin(
        &dir,
        &["homology", "-"],
        &String::from_utf8_lossy(&k4.stdout),
    );
    let profile = stdout_json(&hom);
    assert_eq!(profile["reduced"], Value::Bool(true));
    let groups = profile["groups"].as_array().unwrap();
    let top = groups.iter().find(|g| g["dim"] == 2).unwrap();
    assert_eq!(top["rank"], 1);
}

#[test]
fn graph_file_errors_exit_with_usage_code() {
    let dir = TempDir::new().unwrap();
    let out = run_in(&dir, &["chi", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"vertices":["a"],"edges":[["a","z"]],"loops":[]}"#,
    )
    .unwrap();
    let out = run_in(&dir, &["chi", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(dir.path().join("dup.json"), r#"{"vertices":["a","a"],"edges":[]}"#).unwrap();
    let out = run_in(&dir, &["chi", "dup.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_overruns_exit_with_code_three() {
    let dir = TempDir::new().unwrap();
    let k2 = run_in(&dir, &["build", "complete", "2"]);
    std::fs::write(dir.path().join("k2.json"), &k2.stdout).unwrap();
    let c5 = run_in(&dir, &["build", "cycle", "5"]);
    std::fs::write(dir.path().join("c5.json"), &c5.stdout).unwrap();
    let out = run_in(
        &dir,
        &["build", "exponential", "k2.json", "c5.json", "--vertex-budget", "10"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("32"));
}

#[test]
fn chi_uses_the_cache_and_respects_config_changes() {
    let dir = TempDir::new().unwrap();
    let c5 = run_in(&dir, &["build", "cycle", "5"]);
    std::fs::write(dir.path().join("c5.json"), &c5.stdout).unwrap();

    let first = run_in(&dir, &["chi", "c5.json"]);
    let second = run_in(&dir, &["chi", "c5.json"]);
    assert_eq!(first.stdout, second.stdout, "cache hit must be identical");
    let parsed = stdout_json(&first);
    assert_eq!(parsed["chi"], 3);
    assert_eq!(parsed["status"], "exact");
    assert_eq!(parsed["coloring"]["verified"], "exhaustive");

    let entries = stdout_json(&run_in(&dir, &["cache", "ls"]));
    let count_before = entries["entries"].as_array().unwrap().len();
    assert_eq!(count_before, 1);

    // a budget change fingerprints differently: miss, new entry
    run_in(&dir, &["chi", "c5.json", "--vertex-budget", "123456"]);
    let entries = stdout_json(&run_in(&dir, &["cache", "ls"]));
    assert_eq!(entries["entries"].as_array().unwrap().len(), 2);

    let cleared = stdout_json(&run_in(&dir, &["cache", "clear"]));
    assert_eq!(cleared["removed"], 2);
    let entries = stdout_json(&run_in(&dir, &["cache", "ls"]));
    assert!(entries["entries"].as_array().unwrap().is_empty());
}

#[test]
fn isomorphic_relabelings_share_cache_entries() {
    let dir = TempDir::new().unwrap();
    // C_3 and K_3 are isomorphic, so `chi` should hit the same entry
    let c3 = run_in(&dir, &["build", "cycle", "3"]);
    std::fs::write(dir.path().join("c3.json"), &c3.stdout).unwrap();
    let k3 = run_in(&dir, &["build", "complete", "3"]);
    std::fs::write(dir.path().join("k3.json"), &k3.stdout).unwrap();
    run_in(&dir, &["chi", "c3.json"]);
    run_in(&dir, &["chi", "k3.json"]);
    let entries = stdout_json(&run_in(&dir, &["cache", "ls"]));
    assert_eq!(entries["entries"].as_array().unwrap().len(), 1);
}

#[test]
fn reduce_emits_a_replayable_trace() {
    let dir = TempDir::new().unwrap();
    let c4 = run_in(&dir, &["build", "cycle", "4"]);
    std::fs::write(dir.path().join("c4.json"), &c4.stdout).unwrap();
    let out = stdout_json(&run_in(&dir, &["reduce", "c4.json"]));
    assert_eq!(out["core"]["vertices"].as_array().unwrap().len(), 2);
    let trace = out["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 2);
    for step in trace {
        assert_eq!(step["op"], "fold");
        assert!(step["witness"].is_string());
    }
}

#[test]
fn check_p_reports_witnesses() {
    let dir = TempDir::new().unwrap();
    let c5 = run_in(&dir, &["build", "cycle", "5"]);
    std::fs::write(dir.path().join("c5.json"), &c5.stdout).unwrap();
    let out = stdout_json(&run_in(&dir, &["check-p", "c5.json"]));
    assert_eq!(out["property_p"], Value::Bool(false));
    assert_eq!(out["witness"].as_array().unwrap().len(), 4);

    let k4 = run_in(&dir, &["build", "complete", "4"]);
    std::fs::write(dir.path().join("k4.json"), &k4.stdout).unwrap();
    let out = stdout_json(&run_in(&dir, &["check-p", "k4.json"]));
    assert_eq!(out["property_p"], Value::Bool(true));
    assert_eq!(out["witness"], Value::Null);
}

#[test]
fn verify_writes_reports_and_is_idempotent_modulo_runtime() {
    let dir = TempDir::new().unwrap();
    let args = ["verify", "cormain", "--n", "2", "--m", "2", "--r", "2", "--i", "0"];
    let first = run_in(&dir, &args);
    assert_eq!(first.status.code(), Some(0));
    let second = run_in(&dir, &args);

    let strip = |out: &Output| -> Value {
        let mut v = stdout_json(out);
        v["verdict"]["runtime_ms"] = Value::Null;
        v
    };
    assert_eq!(strip(&first), strip(&second));

    let report = stdout_json(&first);
    assert_eq!(report["version"].as_str().unwrap(), env!("CARGO_PKG_VERSION"));
    assert!(report["seed"].is_u64());
    assert_eq!(report["verdict"]["theorem_id"], "cormain");
    assert_eq!(report["verdict"]["instance"]["m"], "2");
    // the report landed in the report directory
    let reports: Vec<_> = std::fs::read_dir(dir.path().join("reports"))
        .unwrap()
        .collect();
    assert_eq!(reports.len(), 1);
}

#[test]
fn verify_failure_exits_with_code_one() {
    let dir = TempDir::new().unwrap();
    let c5 = run_in(&dir, &["build", "cycle", "5"]);
    std::fs::write(dir.path().join("c5.json"), &c5.stdout).unwrap();
    // C_5 lacks the edge-pair property, so the precondition check fails
    let out = run_in(&dir, &["verify", "main2", "--t", "c5.json", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn build_subcommands_cover_the_named_constructions() {
    let dir = TempDir::new().unwrap();
    let path = stdout_json(&run_in(&dir, &["build", "path", "2", "--loops", "0"]));
    assert_eq!(path["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(path["loops"].as_array().unwrap().len(), 1);

    let k2 = run_in(&dir, &["build", "complete", "2"]);
    std::fs::write(dir.path().join("k2.json"), &k2.stdout).unwrap();
    let myc = stdout_json(&run_in(&dir, &["build", "mycielskian", "k2.json"]));
    assert_eq!(myc["vertices"].as_array().unwrap().len(), 5);
    let myc3 = stdout_json(&run_in(&dir, &["build", "mycielskian", "k2.json", "-r", "3"]));
    assert_eq!(myc3["vertices"].as_array().unwrap().len(), 7);

    let prod = stdout_json(&run_in(&dir, &["build", "product", "k2.json", "k2.json"]));
    assert_eq!(prod["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(prod["edges"].as_array().unwrap().len(), 2);

    let exp = stdout_json(&run_in(&dir, &["build", "exponential", "k2.json", "k2.json"]));
    assert_eq!(exp["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(exp["loops"].as_array().unwrap().len(), 2);
}

#[test]
fn homology_honors_complex_choice_and_no_fold() {
    let dir = TempDir::new().unwrap();
    let c5 = run_in(&dir, &["build", "cycle", "5"]);
    std::fs::write(dir.path().join("c5.json"), &c5.stdout).unwrap();
    let nbhd = stdout_json(&run_in(&dir, &["homology", "c5.json"]));
    let homk2 = stdout_json(&run_in(&dir, &["homology", "c5.json", "--complex", "homk2"]));
    assert_eq!(nbhd, homk2);
    let raw = stdout_json(&run_in(&dir, &["homology", "c5.json", "--no-fold"]));
    assert_eq!(nbhd, raw); // C_5 is fold-irreducible anyway
}
