//! End-to-end runs of the `pivotality` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str], config: Option<&str>, out: &Path) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pivotality"));
    cmd.args(args).arg("--out").arg(out);
    let dir = out.parent().expect("out has a parent");
    if let Some(text) = config {
        let path = dir.join("config.json");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(&path);
    }
    let output = cmd.output().expect("binary runs");
    let mut text = String::from_utf8_lossy(&output.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&output.stderr));
    (output.status.code().unwrap_or(-1), text)
}

fn results(out: &Path, run: u32) -> String {
    fs::read_to_string(out.join(format!("run-{run:03}")).join("results.csv")).unwrap()
}

#[test]
fn identities_suite_passes_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let (code, text) = run(&["all"], Some(r#"{"seed": 1, "suites": ["identities"]}"#), &out);
    assert_eq!(code, 0, "{text}");
    let csv = results(&out, 1);
    assert!(csv.starts_with("suite,check_id,param_json,lhs,rhs,lhs_stderr,rhs_stderr,z_or_gap,threshold,pass\n"));
    assert!(csv.lines().count() - 1 >= 12);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("run-001/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], true);
    assert_eq!(summary["seed"], 1);
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let cases = [
        (vec!["all"], Some(r#"{"seed": 1, "suites": []}"#)),
        (vec!["identities"], Some(r#"{"seed": 1, "reps": 0}"#)),
        (vec!["all"], Some(r#"{"seed": 1, "suites": ["identity"]}"#)),
        (vec!["crofton"], Some(r#"{"seed": 1, "crofton": {"shape": {"kind": "polygon", "vertices": [[0,0],[0,1],[1,0]]}}}"#)),
        (vec!["crofton"], Some(r#"{"seed": 1, "crofton": {"shape": {"kind": "ellipse"}}}"#)),
        (vec!["identities"], Some(r#"{"reps": 10}"#)),
        (vec!["identities"], Some("{not json")),
        (vec!["all", "--suite", "nope", "--seed", "3"], None),
        (vec!["identities", "--suite", "russo", "--seed", "3"], None),
        (vec!["frobnicate"], None),
    ];
    for (args, config) in cases {
        let (code, text) = run(&args, config, &out);
        assert_eq!(code, 2, "{args:?} {config:?}: {text}");
    }
}

#[test]
fn failing_check_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    // A tolerance far below rounding error makes some identity rows fail.
    let cfg = r#"{"seed": 1, "tolerances": {"exact_gap": 1e-30, "relative_gap": 1e-30}}"#;
    let (code, text) = run(&["identities"], Some(cfg), &out);
    assert_eq!(code, 1, "{text}");
    assert!(results(&out, 1).contains(",false"));
}

#[test]
fn same_config_gives_identical_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let cfg = r#"{"seed": 99, "reps": 2000, "suites": ["russo", "poisson-derivative", "crofton"],
                  "crofton": {"shape": {"kind": "polygon", "vertices": [[0,0],[1,0],[0.5,0.8]]}, "t": 0.3, "m": 3}}"#;
    let (a, text) = run(&["all"], Some(cfg), &out);
    assert!(a == 0 || a == 1, "{text}");
    let (b, _) = run(&["all"], Some(cfg), &out);
    assert_eq!(a, b);
    assert_eq!(results(&out, 1).as_bytes(), results(&out, 2).as_bytes());
    // A different seed changes the Monte Carlo rows.
    let (_, _) = run(&["all", "--seed", "100"], Some(cfg), &out);
    assert_ne!(results(&out, 1), results(&out, 3));
}

#[test]
fn suite_flag_selects_and_seed_flag_suffices() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let (code, text) = run(&["all", "--suite", "russo", "--suite", "identities", "--seed", "5"], None, &out);
    assert_eq!(code, 0, "{text}");
    let csv = results(&out, 1);
    let suites: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(suites.first(), Some(&"russo"));
    assert_eq!(suites.last(), Some(&"identities"));
}
