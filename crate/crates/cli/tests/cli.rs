use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use topp_ni::{compute_limit_curves, dp_min_time, AccelRow, ConstraintProfile, TabulatedModel};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topp-ni"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn plan(name: &str, out: &Path) -> Output {
    let cfg = config(name);
    run(&["plan", "--config", cfg.to_str().unwrap()], out)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn mvc_marks_two_pockets_on_case_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("case1.json");
    let out = run(&["mvc", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&dir.path().join("limits.csv"));
    assert_eq!(header, "s,mvc,vlim,mvc_star,is_dagger");
    let flags: Vec<bool> = rows.iter().map(|r| r[4] == "true").collect();
    let runs = flags.windows(2).filter(|w| !w[0] && w[1]).count() + usize::from(flags[0]);
    assert_eq!(runs, 2);
}

#[test]
fn mvc_on_straight_path_is_unbounded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("straight.json");
    let out = run(&["mvc", "--config", cfg.to_str().unwrap(), "--grid", "101"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&dir.path().join("limits.csv"));
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r[1] == "inf" && r[2] == "1.3" && r[4] == "true"));
}

#[test]
fn malformed_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"path\": ").unwrap();
    let out = run(&["mvc", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    let missing = run(&["plan"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn plan_case_one_is_feasible() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(plan("case1.json", dir.path()).status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "feasible");
    assert!(r["traversal_time"].as_f64().unwrap() > 0.0);
    assert_eq!(r["segments"].as_array().unwrap().len(), 4);
    assert!(r["log"].as_array().unwrap().iter().any(|e| e["event"] == "superseded"));

    let (header, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(header, "s,sdot,kind,profile_id");
    assert!(rows.iter().all(|r| r[2] == "alpha" || r[2] == "beta"));
    let (header, rows) = csv_rows(&dir.path().join("switchpoints.csv"));
    assert_eq!(header, "s,sdot,type,transition");
    assert_eq!(rows.iter().filter(|r| r[3] == "ab").count(), 1);
    assert_eq!(rows.iter().filter(|r| r[3] == "ba").count(), 2);
}

#[test]
fn numbers_have_at_most_twelve_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    plan("case1.json", dir.path());
    let (_, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    for cell in rows.iter().flat_map(|r| r[..2].iter()) {
        let mantissa = cell.split('e').next().unwrap();
        let digits = mantissa.chars().filter(char::is_ascii_digit).collect::<String>();
        assert!(digits.trim_start_matches('0').len() <= 12, "{cell}");
    }
}

#[test]
fn plan_case_two_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(plan("case2.json", dir.path()).status.code(), Some(2));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "infeasible");
    assert!(r["s_last"].as_f64().unwrap() < r["path_length"].as_f64().unwrap());
    assert_eq!(r["run_and_test"]["feasible"], false);
    assert!(r["run_and_test"]["gap"].is_array());
}

#[test]
fn untraversable_hill() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(plan("hill.json", dir.path()).status.code(), Some(2));
    let r = report(dir.path());
    assert_eq!(r["cause"], "not traversable");

    // the oracle agrees that the far end cannot be reached
    let cfg: Value = serde_json::from_str(&std::fs::read_to_string(config("hill.json")).unwrap()).unwrap();
    let c = &cfg["constraints"];
    let grid: Vec<f64> = c["s"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let accel: Vec<Vec<AccelRow<f64>>> = c["accel"]
        .as_array()
        .unwrap()
        .iter()
        .map(|rows| {
            rows.as_array()
                .unwrap()
                .iter()
                .map(|r| {
                    let r: Vec<f64> = r.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
                    AccelRow { a: r[0], b: r[1], c: r[2] }
                })
                .collect()
        })
        .collect();
    let cp = ConstraintProfile::from_model(TabulatedModel::new(grid, accel, Vec::new()).unwrap());
    let lc = compute_limit_curves(&cp, 401).unwrap();
    assert_eq!(dp_min_time(&cp, &lc, 0.0, 0.0, 256, 256).unwrap(), None);
}

#[test]
fn demo_cases() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one");
    assert_eq!(run(&["demo-unicycle", "1"], &one).status.code(), Some(0));
    for f in ["limits.csv", "trajectory.csv", "switchpoints.csv", "report.json"] {
        assert!(one.join(f).exists(), "{f}");
    }
    let two = dir.path().join("two");
    assert_eq!(run(&["demo-unicycle", "2"], &two).status.code(), Some(2));
    let r = report(&two);
    assert_eq!(r["property6"]["c1"], true);
    assert_eq!(r["property6"]["c2"], true);
    assert_eq!(run(&["demo-unicycle", "3"], &dir.path().join("three")).status.code(), Some(1));
}

#[test]
fn detect_failure_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for (name, code) in [("case1.json", 0), ("case2.json", 2), ("straight.json", 0)] {
        let cfg = config(name);
        let out = run(&["detect-failure", "--config", cfg.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(code), "{name}");
        let r = report(dir.path());
        assert_eq!(r["run_and_test"]["feasible"], code == 0);
        assert!(r["property6"].is_object());
    }
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    plan("case1.json", a.path());
    plan("case1.json", b.path());
    for f in ["trajectory.csv", "switchpoints.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("straight.json");
    let out = run(&["plan", "--config", cfg.to_str().unwrap(), "--grid", "301", "--step", "0.01"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["config"]["options"]["grid"], 301);
    assert_eq!(r["config"]["options"]["step"], 0.01);
    let (_, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    assert!(rows.len() >= 500);
    let bad = run(&["plan", "--config", cfg.to_str().unwrap(), "--step", "-1"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}
