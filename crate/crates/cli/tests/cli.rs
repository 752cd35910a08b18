use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchlab"))
        .args(args)
        .env_remove("BRANCHLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn fix_measure_of_b() {
    let out = run(&["fix-measure", "--group", "grigorchuk", "--element", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains(r#""fix_measure":{"num":1,"den":7}"#), "{text}");
    let v = json(&out);
    assert_eq!(v["schema"], "branchlab/1");
    assert_eq!(v["element"], "b");
    assert_eq!(v["level_bounds"][3][1], serde_json::json!({"num": 1, "den": 8}));
}

#[test]
fn lemma_check_small() {
    let out = run(&["lemma-check", "--n-max", "4", "--brute-force"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
    assert_eq!(v["brute_force_counterexamples"], serde_json::json!([]));
}

#[test]
fn unknown_symbol_is_a_usage_error() {
    let out = run(&["eval", "--group", "grigorchuk", "--element", "q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`q`"));
    assert_eq!(run(&["eval", "--group", "nonesuch", "--element", "a"]).status.code(), Some(2));
    assert_eq!(run(&["orbits", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion() {
    let out = run(&["--budget", "1", "trivial", "--element", "abacabad"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_branchlab"))
        .args(["trivial", "--element", "abacabad"])
        .env("BRANCHLAB_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["--budget", "0", "trivial", "--element", "a"]).status.code(), Some(2));
}

#[test]
fn certificates_and_verification_failures() {
    let out = run(&["tnf-cert", "--group", "grigorchuk", "--level", "1", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["achieved"], true);
    assert_eq!(v["elements"][0]["element"], "d");

    let out = run(&["tnf-cert", "--group", "binary-odometer", "--level", "2", "--radius", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["achieved"], false);

    let out = run(&["anf", "--set", "0", "--eps", "1/8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["defect"], serde_json::json!({"num": 1, "den": 14}));
    assert_eq!(v["verified"], true);
    assert_eq!(run(&["anf", "--set", "0", "--eps", "x"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["psd-check", "--random", "5", "--seed", "11"][..],
        &["separate", "--n-max", "2", "--level", "1", "--depth", "6"][..],
        &["components", "--n", "2", "--level", "3", "--tower"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let v = json(&run(&["psd-check", "--random", "5", "--seed", "11"]));
    assert_eq!(v["seed"], 11);
    assert_eq!(v["psd"], true);
}

#[test]
fn csv_tables() {
    let out = run(&["orbits", "--n", "2", "--level", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "id,size,weight,representative\n0,2,1/4,00 01\n1,4,1/2,00 10\n");

    let out = run(&["char-interval", "--element", "b", "--n", "2", "--level", "2", "--depth", "6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("component,element,lower,upper"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert!(cells[2].contains('/') && cells[3].contains('/'));
    }

    assert_eq!(run(&["trivial", "--element", "a", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn text_format_renders_fractions() {
    let out = run(&["char", "--element", "d", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("char: 4/7"));
}

#[test]
fn parse_reports_positions() {
    let dir = std::env::temp_dir().join(format!("branchlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("odometer.grp");
    std::fs::File::create(&good).unwrap().write_all(b"alphabet = 2\ngen a = perm (0 1) [e, a]\n").unwrap();
    let bad = dir.join("bad.grp");
    std::fs::File::create(&bad).unwrap().write_all(b"alphabet = 2\ngen a = perm (0 1) [e]\n").unwrap();

    let out = run(&["parse", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["generators"], serde_json::json!(["a"]));

    let out = run(&["fix-measure", "--group", good.to_str().unwrap(), "--element", "a"]);
    assert_eq!(json(&out)["fix_measure"], serde_json::json!({"num": 0, "den": 1}));

    let out = run(&["parse", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(&format!("{}:2:20:", bad.display())), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn catalog_and_symmetric_checks() {
    let v = json(&run(&["catalog", "show", "grigorchuk"]));
    assert!(v["grp"].as_str().unwrap().contains("gen d = perm () [e, b]"));
    let v = json(&run(&["r-invariant", "--j", "2"]));
    assert_eq!(v["invariant"], true);
    assert_eq!(v["classes"].as_array().unwrap().len(), 4);
    let v = json(&run(&["sym-check", "--level", "2", "--sets", "00,01;10"]));
    assert_eq!(v["holds"], true);
    assert_eq!(run(&["sym-check", "--level", "2", "--sets", "00;00"]).status.code(), Some(2));
}
