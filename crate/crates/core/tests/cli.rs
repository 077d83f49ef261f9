use std::path::PathBuf;
use std::process::{Command, Output};

fn hamsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamsim"))
        .args(args)
        .env("HAMSIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_from_file_uses_model_scales() {
    let out = hamsim(&[
        "analyze",
        "--hamiltonian",
        &data("chain_4q.ham"),
        "--t-grid",
        "1,10",
        "--methods",
        "qdrift,ts-best",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,lambda_t,method,epsilon,gates");
    assert_eq!(lines.len(), 5);
    // lambda = 1.2 for the bundled chain
    assert!(lines[3].starts_with("1e1,1.2e1,qdrift,"), "{}", lines[3]);
}

#[test]
fn analyze_json_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let out = hamsim(&[
        "analyze",
        "--lambda",
        "1",
        "--Lambda",
        "0.1",
        "--L",
        "100",
        "--t-grid",
        "log:10:1000:3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--hamiltonian",
        &data("reference_1q.ham"),
        "--t",
        "1.25",
        "--segments",
        "8",
        "--order",
        "2",
        "--samples",
        "200",
        "--seed",
        "5",
    ];
    let a = hamsim(&args);
    let b = hamsim(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["method"], "qswift2");
    assert_eq!(report["seed"], 5);
    let value = report["value"].as_f64().unwrap();
    let reference = report["reference"].as_f64().unwrap();
    assert!((value - reference).abs() < 0.1, "{value} vs {reference}");
}

#[test]
fn simulate_rejects_order_above_segments() {
    let out = hamsim(&[
        "simulate",
        "--hamiltonian",
        &data("reference_1q.ham"),
        "--t",
        "1",
        "--segments",
        "2",
        "--order",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn overwide_hamiltonian_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.ham");
    std::fs::write(&path, format!("1.0 {}\n", "X".repeat(25))).unwrap();
    let out = hamsim(&["simulate", "--hamiltonian", path.to_str().unwrap(), "--t", "1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn malformed_hamiltonian_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ham");
    std::fs::write(&path, "0.5 XQ\n").unwrap();
    let out = hamsim(&["budget", "--hamiltonian", path.to_str().unwrap(), "--t", "1", "--segments", "8", "--epsilon", "1e-2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_lists_every_bucket() {
    let out = hamsim(&[
        "budget",
        "--hamiltonian",
        &data("chain_4q.ham"),
        "--t",
        "1",
        "--segments",
        "16",
        "--order",
        "3",
        "--epsilon",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with('"'))
        .map(|l| l.split('"').nth(1).unwrap())
        .collect();
    assert_eq!(keys, ["2", "3", "4", "2,2"]);
    assert!(text.lines().last().unwrap().starts_with("total,"));
}

#[test]
fn verify_swift_suite_passes() {
    let out = hamsim(&["verify", "--suite", "swift"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn json_method_names_match_csv() {
    let out = hamsim(&["analyze", "--lambda", "1", "--Lambda", "1", "--L", "1", "--t-grid", "1", "--methods", "qswift3,ts-best", "--format", "json"]);
    let table: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(table["rows"][0]["method"], "qswift3");
    assert_eq!(table["rows"][1]["method"], "ts-best");
}
