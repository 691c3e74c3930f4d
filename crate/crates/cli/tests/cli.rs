use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn xjoin(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_xjoin"));
    cmd.args(args).env_remove("XJOIN_CAPS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_matches_golden_dot() {
    let out = xjoin(&["build", path(&scenario("two_block_xjoin.json"))], &[]);
    assert_eq!(code(&out), 0);
    let golden = include_str!("golden/two_block_xjoin.dot");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn build_writes_json_and_fibers_then_aut_and_export_read_it() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("w.json");
    let fibers = dir.path().join("fibers");
    let out = xjoin(
        &[
            "build",
            path(&scenario("two_block_xjoin.json")),
            "--out",
            "json",
            "-o",
            graph.to_str().unwrap(),
            "--fibers-dir",
            fibers.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_dir(&fibers).unwrap().count(), 2);

    let out = xjoin(&["aut", graph.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0);
    let aut: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(aut["order"], 48);
    assert_eq!(aut["vertex_transitive"], false);

    let out = xjoin(&["export", graph.to_str().unwrap(), "--format", "edgelist"], &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 17);
}

#[test]
fn synth_search_succeeds_and_theorem_mode_is_refused() {
    let sc = scenario("d6_over_c3sq.json");
    let out = xjoin(&["synth", path(&sc)], &[]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["r_order"], 18);

    let out = xjoin(&["synth", path(&sc), "--mode", "theorem"], &[]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1)"));
}

fn stripped_report(args: &[&str]) -> Value {
    let out = xjoin(args, &[]);
    assert_eq!(code(&out), 0);
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v.as_object_mut().unwrap().remove("timing_ms").expect("timing present");
    v
}

#[test]
fn reports_are_deterministic_across_runs_and_strategies() {
    for name in ["d6_over_c3sq.json", "q8_fibers.json", "gjoin_c4_c3.json"] {
        let sc = scenario(name);
        let first = stripped_report(&["synth", path(&sc)]);
        assert_eq!(first, stripped_report(&["synth", path(&sc)]), "{name}");
        assert_eq!(first, stripped_report(&["--sequential", "synth", path(&sc)]), "{name}");
    }
}

#[test]
fn synth_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = xjoin(
        &["synth", path(&scenario("q8_fibers.json")), "--report", report.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["r_order"], 16);
    assert_eq!(v["hypotheses"]["semidirect_fiber"], false);
}

#[test]
fn verify_passes_on_every_scenario() {
    for name in ["two_block_xjoin.json", "d6_over_c3sq.json", "q8_fibers.json", "gjoin_c4_c3.json"] {
        let out = xjoin(&["verify", path(&scenario(name))], &[]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    }
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&xjoin(&["synth", bad.to_str().unwrap()], &[])), 3);
    assert_eq!(code(&xjoin(&["build", "/nonexistent/scenario.json"], &[])), 3);
    assert_eq!(code(&xjoin(&["frobnicate"], &[])), 3);
    let sc = scenario("d6_over_c3sq.json");
    assert_eq!(code(&xjoin(&["synth", path(&sc)], &[("XJOIN_CAPS", "budget=x")])), 3);
}

#[test]
fn exhausted_search_exits_4() {
    let sc = scenario("d6_over_c3sq.json");
    let out = xjoin(&["synth", path(&sc), "--mode", "search"], &[("XJOIN_CAPS", "budget=0")]);
    assert_eq!(code(&out), 4);
}

#[test]
fn caps_exit_5() {
    let sc = scenario("q8_fibers.json");
    let out = xjoin(&["verify", path(&sc)], &[("XJOIN_CAPS", "aut=4")]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    let out = xjoin(&["synth", path(&sc)], &[("XJOIN_CAPS", "group=4")]);
    assert_eq!(code(&out), 5);
}
