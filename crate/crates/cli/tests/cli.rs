use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_posigraph"))
}

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("posigraph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn grid_into_single_edge_counts_twelve() {
    let grid = run(&["construct", "grid", "3"], None);
    assert!(grid.status.success());
    let text = String::from_utf8(grid.stdout).unwrap();
    let out = run(&["homcount", "--target", "single-edge-3"], Some(&text));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["homomorphisms"], "12");
}

#[test]
fn four_cycle_involution() {
    let out = run(&["involution", "--input", "cycle-4"], None);
    let v = json(&out);
    assert_eq!(v["involution"]["fixed"], serde_json::json!([0, 2]));
    assert_eq!(v["involution"]["pairs"], serde_json::json!([[1, 3]]));
}

#[test]
fn certify_exit_codes() {
    let star = run(&["certify", "--input", "star-3"], None);
    assert_eq!(star.status.code(), Some(1));
    assert_eq!(json(&star)["report"]["verdict"], "non-positive-certified");
    let c4 = run(&["certify", "--input", "cycle-4"], None);
    assert_eq!(c4.status.code(), Some(0));
    let fano = run(&["certify", "--input", "fano"], None);
    assert_eq!(json(&fano)["certificate"]["sum"], "-168");
}

#[test]
fn pipeline_is_reproducible_and_verifiable() {
    let args = ["grid-pipeline", "--r", "3", "--n", "15", "--seed", "7"];
    let first = run(&args, None);
    let second = run(&args, None);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let cert = json(&first);
    assert_eq!(cert["provenance"], "grid-pipeline");

    let good = scratch("cert.json");
    std::fs::write(&good, &first.stdout).unwrap();
    let ok = run(&["verify", "--input", good.to_str().unwrap()], None);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["valid"], true);

    let mut tampered = cert.clone();
    let sum: i64 = cert["sum"].as_str().unwrap().parse().unwrap();
    tampered["sum"] = Value::String((sum + 1).to_string());
    let bad = scratch("tampered.json");
    std::fs::write(&bad, tampered.to_string()).unwrap();
    let rejected = run(&["verify", "--input", bad.to_str().unwrap()], None);
    assert_eq!(rejected.status.code(), Some(2));
    assert_eq!(json(&rejected)["valid"], false);
}

#[test]
fn invalid_input_exits_two() {
    let out = run(&["homcount", "--target", "grid-3"], Some("{\"r\": 3}"));
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn generator_shortfall_exits_three() {
    let out = run(&["grid-pipeline", "--r", "5", "--n", "5"], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_check_passes() {
    let out = run(&["check", "--budget", "15", "--seed", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["failures"], serde_json::json!([]));
}

#[test]
fn density_of_levi_graph() {
    let step = scratch("bip.json");
    std::fs::write(&step, r#"{"mode":"exact","n":1,"N":1,"entries":["-1/2"]}"#).unwrap();
    let out = run(&["density", "--input", "subdivision-krr-2", "--step", step.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["density"], "1/256");
}
