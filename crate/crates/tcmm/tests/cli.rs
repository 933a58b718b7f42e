use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tcmm::scaling::read_csv;

fn tcmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcmm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("algorithms")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn params_report() {
    let out = tcmm(&["params", "--algo", "strassen"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["omega"].as_f64().unwrap() - 2.8074).abs() < 1e-4);
    assert!((v["gamma"].as_f64().unwrap() - 0.4906).abs() < 1e-4);
    assert_eq!(v["alpha"], "7/12");
    let file = tcmm(&["params", "--algo", &fixture("strassen.json")]);
    assert_eq!(json(&file)["gamma"], v["gamma"]);

    let naive = tcmm(&["params", "--algo", &fixture("naive8.json")]);
    assert_eq!(naive.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&naive.stderr).contains("r > T^2"));
    assert_eq!(tcmm(&["params", "--algo", "/no/such/file.json"]).status.code(), Some(3));
}

#[test]
fn build_and_simulate_identity() {
    let dir = tempfile::tempdir().unwrap();
    let net = path(&dir, "m4.json");
    let out = tcmm(&[
        "build", "--kind", "matmul", "--n", "4", "--bits", "4", "--depth-budget", "2", "--out",
        s(&net),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["depth"], report["expected_depth"]);
    let t = report["t"].as_u64().unwrap();
    assert_eq!(report["depth"].as_u64().unwrap(), 4 * t + 1);

    let b = "[[1,-2,3,-4],[5,-6,7,-8],[9,-10,11,-12],[13,-14,15,0]]";
    let input = path(&dir, "in.json");
    let eye = "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";
    std::fs::write(&input, format!("{{\"A\": {eye}, \"B\": {b}}}")).unwrap();
    let sim = tcmm(&["simulate", "--netlist", s(&net), "--input", s(&input)]);
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    let want: Value = serde_json::from_str(b).unwrap();
    assert_eq!(json(&sim)["C"], want);

    std::fs::write(&input, "{\"A\": [[1, 2]").unwrap();
    let bad = tcmm(&["simulate", "--netlist", s(&net), "--input", s(&input)]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn trace_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "k4.json");
    std::fs::write(&input, r#"{"A": [[0,1,1,1],[1,0,1,1],[1,1,0,1],[1,1,1,0]]}"#).unwrap();
    for (tau, want) in [("24", true), ("25", false)] {
        let net = path(&dir, "t.json");
        let out = tcmm(&[
            "build", "--kind", "trace", "--n", "4", "--bits", "1", "--loglog", "--symmetric",
            "--tau", tau, "--out", s(&net),
        ]);
        assert!(out.status.success());
        let r = json(&out);
        assert_eq!(r["depth"].as_u64().unwrap(), 2 * r["t"].as_u64().unwrap() + 2);
        let sim = json(&tcmm(&["simulate", "--netlist", s(&net), "--input", s(&input)]));
        assert_eq!(sim["decision"], want);
    }
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let net = path(&dir, "x.json");
    let base = ["build", "--n", "4", "--bits", "2", "--loglog", "--out", s(&net)];
    let with = |extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(extra);
        tcmm(&args).status.code()
    };
    assert_eq!(with(&["--kind", "trace"]), Some(2));
    assert_eq!(with(&["--kind", "matmul", "--tau", "3"]), Some(2));
    assert_eq!(with(&["--kind", "matmul", "--depth-budget", "2"]), Some(2));
    let six = tcmm(&["build", "--kind", "matmul", "--n", "6", "--bits", "2", "--loglog", "--out", s(&net)]);
    assert_eq!(six.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&six.stderr).contains("power"));
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = tcmm(&[
        "verify", "--kind", "matmul", "--n", "8", "--bits", "5", "--depth-budget", "3",
        "--trials", "100", "--seed", "7",
    ]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["trials_passed"], 100);
    for key in ["gates", "depth", "wires", "max_fanin"] {
        assert!(r[key].as_u64().unwrap() > 0, "{key}");
    }
    let sym = json(&tcmm(&[
        "verify", "--kind", "trace", "--symmetric", "--n", "8", "--bits", "1", "--loglog",
        "--trials", "100",
    ]));
    assert_eq!(sym["checks_passed"], 300);
    let none = tcmm(&["verify", "--kind", "matmul", "--n", "4", "--bits", "2", "--loglog", "--trials", "0"]);
    assert!(none.status.success());
    assert_eq!(json(&none)["checks"], 0);

    let dir = tempfile::tempdir().unwrap();
    let broken = path(&dir, "broken.json");
    let text = std::fs::read_to_string(fixture("strassen.json")).unwrap();
    std::fs::write(&broken, text.replacen("[1, 0, 0, 0]", "[-1, 0, 0, 0]", 1)).unwrap();
    let bad = tcmm(&[
        "verify", "--kind", "matmul", "--n", "4", "--bits", "3", "--loglog", "--trials", "10",
        "--algo", s(&broken),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(json(&bad)["trials_passed"].as_u64().unwrap() < 10);
}

#[test]
fn builds_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let net = path(&dir, name);
        let out = tcmm(&[
            "build", "--kind", "trace", "--n", "8", "--bits", "2", "--depth-budget", "2",
            "--tau", "-5", "--out", s(&net),
        ]);
        (out.stdout, std::fs::read(net).unwrap())
    };
    assert_eq!(run("a.json"), run("b.json"));
    let v1 = tcmm(&["verify", "--kind", "trace", "--n", "4", "--bits", "3", "--loglog", "--seed", "3"]);
    let v2 = tcmm(&["verify", "--kind", "trace", "--n", "4", "--bits", "3", "--loglog", "--seed", "3"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn scaling_table() {
    let out = tcmm(&[
        "scaling", "--kind", "matmul", "--bits", "3", "--depth-budgets", "1,4", "--n-list", "4,8,16",
    ]);
    assert!(out.status.success());
    let rows = read_csv(&out.stdout[..]).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!((r.depth - 1) % 4, 0);
    }
    let bad = tcmm(&["scaling", "--kind", "matmul", "--n-list", "4,6"]);
    assert_eq!(bad.status.code(), Some(2));
}
