use halfwave::io::map_from_json;
use halfwave::linalg::c;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfwave")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn build_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn build_single_soliton() {
    let o = run(&["build", "single", "--v", "0.5", "--y", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let m = map_from_json(&stdout(&o)).unwrap();
    assert_eq!(m.n(), 1);
    assert!((m.residues[0].z - c(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn build_constant_and_stereographic() {
    let m = map_from_json(&stdout(&run(&["build", "constant", "--d", "2", "--k", "1"]))).unwrap();
    assert_eq!(m.n(), 0);
    let m = map_from_json(&stdout(&run(&["build", "stereographic", "--P", "0,1", "--Q", "1"]))).unwrap();
    assert_eq!(m.n(), 1);
    assert!((m.residues[0].z - c(0.0, -1.0)).norm() < 1e-12);
}

#[test]
fn build_is_deterministic() {
    let a = run(&["build", "random", "--seed", "7", "--d", "3", "--n", "3"]);
    let b = run(&["build", "random", "--seed", "7", "--d", "3", "--n", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["build", "random", "--seed", "8", "--d", "3", "--n", "3"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn build_rejects_bad_data() {
    let o = run(&["build", "multi", "--v", "-0.5,0.5", "--y", "-2,2"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "non_convergence");
    assert_eq!(run(&["build", "single", "--v", "1.2"]).status.code(), Some(2));
    assert_eq!(run(&["build", "stereographic", "--P", "0,0,1", "--Q", "0,1"]).status.code(), Some(2));
}

#[test]
fn evolve_translates_soliton() {
    let dir = tempfile::tempdir().unwrap();
    let map = build_to(dir.path(), "s.json", &["single", "--v", "0.5", "--y", "1"]);
    let out = dir.path().join("ev");
    let o = run(&["evolve", &map, "--times", "0,10,-4", "--grid", "-3:3:7", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let snaps: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("snapshots.json")).unwrap()).unwrap();
    for (k, t) in [0.0, 10.0, -4.0].iter().enumerate() {
        let z = &snaps[k]["map"]["poles"][0]["z"];
        assert!((z["re"].as_f64().unwrap() - (1.0 + 0.5 * t)).abs() < 1e-10);
        assert!((z["im"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    }
    let csv = std::fs::read_to_string(out.join("samples.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().ends_with(",u1,u2,u3"));
    assert_eq!(lines.count(), 21);
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    for row in diag["drift"].as_array().unwrap() {
        assert!(row["spectrum"].as_f64().unwrap() < 1e-10);
    }

    // byte-identical rerun
    let again = dir.path().join("ev2");
    run(&["evolve", &map, "--times", "0,10,-4", "--grid", "-3:3:7", "--out-dir", again.to_str().unwrap()]);
    for f in ["snapshots.json", "samples.csv", "diagnostics.json"] {
        assert_eq!(std::fs::read(out.join(f)).unwrap(), std::fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn spectrum_report() {
    let dir = tempfile::tempdir().unwrap();
    let map = build_to(dir.path(), "m.json", &["multi", "--v", "-0.5,0.5", "--y", "-500,500"]);
    let rep: serde_json::Value = serde_json::from_slice(&run(&["spectrum", &map]).stdout).unwrap();
    assert_eq!(rep["simple"], true);
    let ev: Vec<f64> = rep["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((ev[0] + 0.5).abs() < 2e-3 && (ev[1] - 0.5).abs() < 2e-3);
}

#[test]
fn resolve_writes_report_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let map = build_to(dir.path(), "m.json", &["multi", "--v", "-0.5,0.5", "--y", "-35,35"]);
    let out = dir.path().join("rs");
    let o = run(&["resolve", &map, "--t-list", "1000,10000", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("resolution.json")).unwrap()).unwrap();
    assert_eq!(rep["solitons"].as_array().unwrap().len(), 2);
    let slope = rep["slope"]["sup"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.1, "{slope}");
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,sup,H0.5");

    let deg = build_to(dir.path(), "deg.json", &["multi", "--v", "0.2,0.2", "--y", "-500,500"]);
    assert_eq!(run(&["resolve", &deg, "--out-dir", out.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn check_suites() {
    let dir = tempfile::tempdir().unwrap();
    let constant = build_to(dir.path(), "c.json", &["constant", "--d", "2", "--k", "1"]);
    assert!(run(&["check", &constant]).status.success());
    let single = build_to(dir.path(), "s.json", &["single", "--v", "0.3"]);
    let o = run(&["check", &single, "--suite", "full"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["pass"], true);
    assert!(rep["checks"].as_array().unwrap().iter().any(|c| c["name"] == "cayley_spectrum"));

    // corrupt one residue entry
    let mut j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&single).unwrap()).unwrap();
    let re = j["poles"][0]["A"][0][1]["re"].as_f64().unwrap();
    j["poles"][0]["A"][0][1]["re"] = (re + 0.1).into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, j.to_string()).unwrap();
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["pass"], false);
}

#[test]
fn missing_file_is_io_error() {
    assert_eq!(run(&["spectrum", "/nonexistent/map.json"]).status.code(), Some(1));
}
