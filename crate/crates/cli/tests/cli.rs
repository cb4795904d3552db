use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pluripot")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn success_and_failed_check_codes() {
    let (code, out) = run(&["chain", "run", "--n", "2", "--alpha", "2", "--beta", "1.2", "--C", "10", "--lambda-target", "690"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["m"], 3);
    assert_eq!(v["pass"], true);
    let (code, out) = run(&["envelope", "check", "--lemma", "blocki", "--params", r#"{"h":0.04}"#]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn errors_exit_one_with_a_code() {
    let (code, out) = run(&["chain", "run", "--n", "2", "--alpha", "1", "--beta", "1.2", "--C", "10", "--lambda-target", "5"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert!(v["error"].is_string());
    assert!(v["message"].is_string());
    let (code, _) = run(&["capacity", "eval", "--set", r#"{"intervals": [[0, 1]"#]);
    assert_eq!(code, 1);
    let (code, _) = run(&["capacity", "frobnicate"]);
    assert_eq!(code, 1);
    let (code, _) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn inadmissible_pair_is_reported_not_rejected() {
    let (code, out) = run(&["chain", "admissible", "--n", "2", "--alpha", "1.0"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["admissible"], false);
    assert!((v["threshold"].as_f64().unwrap() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
}

#[test]
fn dry_run_validates_without_solving() {
    let (code, out) = run(&["--dry-run", "envelope", "green", "--domain", "disk", "--pole", "0.5", "--h", "0.001"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["dry_run"], true);
    assert_eq!(v["command"], "envelope green");
    let (code, _) = run(&["--dry-run", "envelope", "green", "--domain", r#"{"kind":"disk","radius":-1}"#, "--pole", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn csv_and_manifest() {
    let dir = std::env::temp_dir().join(format!("pluripot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("out.csv");
    let manifest = dir.join("manifest.json");
    let (code, stdout) = run(&[
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "capacity",
        "eval",
        "--set",
        r#"{"intervals":[[-1,1]]}"#,
        "--nodes",
        "32",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("k,re,im,weight"));
    assert_eq!(csv.lines().count(), 33);
    let m = json(&std::fs::read_to_string(&manifest).unwrap());
    for key in ["command_line", "config_hash", "tool_version", "wall_time_seconds", "seed", "tolerances", "pass", "exit_code"] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(m["seed"], 42);
    std::fs::remove_dir_all(&dir).unwrap();
}
