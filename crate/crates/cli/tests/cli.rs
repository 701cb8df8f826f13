use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toda-mirror"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn passing_run_exits_zero() {
    let out = run(&["commute", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["task"], "commute");
    assert_eq!(r["pass"], true);
    for key in ["params", "results", "residuals", "runtime_ms", "version", "command"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["command"][1], "commute");
}

#[test]
fn critical_census_for_n2() {
    let out = run(&["critical", "--n", "2", "--lambda", "1/4,1/8,-3/8", "--q", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"].as_array().unwrap().len(), 6);
    assert_eq!(r["params"]["lambda"][2], "-3/8");
    assert!(r["results"][0]["critical_value"].as_array().unwrap().len() == 2);
}

#[test]
fn failing_check_exits_one() {
    // A tolerance no quadrature can meet.
    let out = run(&["eigen", "--n", "1", "--lambda", "1/2,-1/2", "--q", "1", "--hbar", "-1", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["critical", "--lambda", "1/3,1/3,1/3"][..],
        &["critical", "--lambda", "1/4,1/4,-1/2"],
        &["critical", "--n", "2", "--q", "1,-1"],
        &["eigen", "--hbar", "1"],
        &["unknown-task"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn same_seed_gives_identical_json() {
    let args = ["critical", "--n", "2", "--seed", "11", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["runtime_ms"], 0);
    let c = run(&["critical", "--n", "2", "--seed", "12", "--no-timing"]);
    assert_ne!(json(&a)["params"]["lambda"], json(&c)["params"]["lambda"]);
}

#[test]
fn text_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text_path = dir.path().join("r.txt");
    let json_path = dir.path().join("r.json");
    let base = ["mirror", "--n", "2", "--no-timing", "--format"];
    let t = run(&[&base[..], &["text", "--output", text_path.to_str().unwrap()]].concat());
    let j = run(&[&base[..], &["json", "--output", json_path.to_str().unwrap()]].concat());
    assert_eq!(t.status.code(), Some(0));
    assert_eq!(j.status.code(), Some(0));
    let from_text = toda_mirror::harness::VerificationReport::from_text(&std::fs::read_to_string(&text_path).unwrap())
        .unwrap();
    let from_json =
        toda_mirror::harness::VerificationReport::from_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    // The echoed command lines differ in format and output path only.
    assert_eq!(from_text.results, from_json.results);
    assert_eq!(from_text.residuals, from_json.residuals);
    assert_eq!(from_text.params, from_json.params);
    assert_eq!(from_text.pass, from_json.pass);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.conf");
    std::fs::write(&cfg, "# suite settings\nn = 3\nlambda = 1/2, -1/2\n").unwrap();
    let out = run(&["critical", "--config", cfg.to_str().unwrap(), "--n", "1", "--q", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["params"]["n"], 1);
    assert_eq!(r["results"].as_array().unwrap().len(), 2);
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["commute", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
