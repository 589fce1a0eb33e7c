use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn polygeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polygeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cnorm(v: &Value) -> f64 {
    v[0].as_f64().unwrap().hypot(v[1].as_f64().unwrap())
}

#[test]
fn roots_of_z_squared_plus_one() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "p.json", &json!({"schema": "polygeom/1", "coeffs": [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let out = polygeom(&["roots", "--poly", s(&poly)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "polygeom/1");
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    // sorted by (re, im): -i before i, both with re ~ 0
    assert!((roots[0][1].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((roots[1][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn root_iteration_limit_exits_with_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "p.json", &json!({"coeffs": [[-3.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let out = polygeom(&["roots", "--poly", s(&poly), "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(polygeom(&["roots", "--poly", "/nonexistent.json"]).status.code(), Some(2));
    let foreign = write(&dir, "p.json", &json!({"schema": "polygeom/9", "coeffs": [[1.0, 0.0], [1.0, 0.0]]}));
    assert_eq!(polygeom(&["roots", "--poly", s(&foreign)]).status.code(), Some(2));
    let constant = write(&dir, "c.json", &json!({"coeffs": [[1.0, 0.0]]}));
    assert_eq!(polygeom(&["roots", "--poly", s(&constant)]).status.code(), Some(2));
    assert_eq!(polygeom(&["fuzz", "--property", "grace", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(polygeom(&["fuzz", "--property", "theorem2", "--n-min", "2"]).status.code(), Some(2));
}

#[test]
fn apolar_pair() {
    // a = z^2 - 1 and b = z^2 + 1 at frame 2: 1 * 1 + 0 + (-1) * 1 = 0
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &json!({"coeffs": [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let b = write(&dir, "b.json", &json!({"coeffs": [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let out = polygeom(&["apolar", "--a", s(&a), "--b", s(&b), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["apolar"], true);
    assert!(cnorm(&v["value"]) < 1e-15);
}

#[test]
fn grace_finds_a_zero_of_b_and_reports_violations() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &json!({"coeffs": [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let b = write(&dir, "b.json", &json!({"coeffs": [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let disk = write(&dir, "d.json", &json!({"kind": "disk", "center": [0.0, 0.0], "radius": 1.0}));
    let svg = dir.path().join("g.svg");
    let out = polygeom(&["grace", "--a", s(&a), "--b", s(&b), "--region", s(&disk), "--svg-out", s(&svg)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((cnorm(&v["point"]) - 1.0).abs() < 1e-12);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));

    let small = write(&dir, "s.json", &json!({"kind": "disk", "center": [0.0, 0.0], "radius": 0.5}));
    let out = polygeom(&["grace", "--a", s(&a), "--b", s(&b), "--region", s(&small)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["status"], "hypothesis_violated");
}

#[test]
fn counterexample_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &json!({"n": 2, "E": [[0.0, 0.0], [1.0, 0.0]]}));
    let w = write(&dir, "w.json", &json!({"points": [[-1.0, 0.0], [1.0, 0.0]]}));
    let ext = write(&dir, "ext.json", &json!({"kind": "exterior", "center": [0.0, 0.0], "radius": 1.0, "closed": true}));
    let disk = write(&dir, "disk.json", &json!({"kind": "disk", "center": [0.0, 0.0], "radius": 1.0}));

    let out = polygeom(&["coincidence", "--multiaffine", s(&p), "--points", s(&w), "--region", s(&ext), "--classic"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "hypothesis_violated");
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["in_region"], false);
    assert!(cnorm(&sols[0]["point"]) < 1e-12);

    // the extended hypothesis fails too: q' = 2z vanishes at 0
    let out = polygeom(&["coincidence", "--multiaffine", s(&p), "--points", s(&w), "--region", s(&ext)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["hypothesis"]["holds"], false);

    let out = polygeom(&["coincidence", "--multiaffine", s(&p), "--points", s(&w), "--region", s(&disk), "--classic"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(cnorm(&stdout_json(&out)["witness"]["point"]) <= 1e-10);
}

#[test]
fn theorem1_reports_the_residual() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &json!({"n": 3, "E": [[0.5, 0.0], [1.0, -2.0], [0.3, 0.1]]}));
    let w = write(&dir, "w.json", &json!({"points": [[1.0, 0.0], [-0.5, 0.7], [0.2, -1.1]]}));
    let out = polygeom(&["theorem1", "--multiaffine", s(&p), "--points", s(&w)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["m"], 2);
    assert!(v["apolarity_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn theorem2_generate_then_check() {
    let dir = TempDir::new().unwrap();
    let out = polygeom(&["theorem2", "--generate", "--n", "7", "--seed", "5", "--radius", "1.5", "--outer-distance", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let inst = stdout_json(&out);
    assert_eq!(inst["inner"].as_array().unwrap().len(), 6);
    let path = write(&dir, "t.json", &inst);
    for k in 1..7 {
        let out = polygeom(&["theorem2", "--instance", s(&path), "--k", &k.to_string()]);
        assert_eq!(out.status.code(), Some(0));
        let v = stdout_json(&out);
        assert_eq!(v["satisfied"], true);
        assert!(v["count_in_disk"].as_u64().unwrap() >= v["bound"].as_u64().unwrap());
    }
}

#[test]
fn fuzz_reports_are_byte_identical_across_jobs() {
    let dir = TempDir::new().unwrap();
    let mut texts = Vec::new();
    for jobs in ["1", "3", "8"] {
        let path = dir.path().join(format!("r{jobs}.json"));
        let out = polygeom(&["fuzz", "--property", "grace", "--trials", "100", "--seed", "7", "--jobs", jobs, "--json-out", s(&path)]);
        assert_eq!(out.status.code(), Some(0));
        let file = std::fs::read(&path).unwrap();
        assert_eq!(file, out.stdout);
        texts.push(file);
    }
    assert!(texts.iter().all(|t| t == &texts[0]));
    let v: Value = serde_json::from_slice(&texts[0]).unwrap();
    assert_eq!(v["passed"], 100);
    assert!(v.get("wall_time").is_none());
    let timed = stdout_json(&polygeom(&["fuzz", "--property", "grace", "--trials", "5", "--timing"]));
    assert!(timed["wall_time"].as_f64().is_some());
}

#[test]
fn single_small_derivative_trial_passes() {
    let out = polygeom(&["fuzz", "--property", "theorem2", "--trials", "1", "--seed", "3", "--n-min", "3", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], 1);
    assert_eq!(v["config"]["n_range"], json!([3, 3]));
}

#[test]
fn counterexample_fixture_is_recorded_not_failed() {
    let out = polygeom(&["fuzz", "--property", "walsh_classic", "--fixture", "counterexample", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], 3);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["hypothesis_violations"], 3);
}

#[test]
fn failure_records_replay_to_the_same_verdict() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let out = polygeom(&[
        "fuzz", "--property", "apolarity_identity", "--trials", "20", "--seed", "9",
        "--tolerance", "identity_tol=1e-300", "--json-out", s(&report),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let failures = v["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    for (i, record) in failures.iter().enumerate() {
        // the report carries its tolerances, so replaying from it reproduces the verdict
        let out = polygeom(&["replay", "--instance", s(&report), "--index", &i.to_string()]);
        assert_eq!(out.status.code(), Some(1));
        let r = stdout_json(&out);
        assert_eq!(r["verdict"], record["verdict"]);
        assert_eq!(r["governing_tolerance"], "identity_tol");
        assert_eq!(r["governing_value"], 1e-300);

        // a bare record replays under default tolerances, where it passes
        let path = write(&dir, "record.json", record);
        let out = polygeom(&["replay", "--instance", s(&path), "--property", "apolarity_identity"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout_json(&out)["verdict"], "pass");
    }
}

#[test]
fn emitted_instances_replay() {
    let dir = TempDir::new().unwrap();
    let out = polygeom(&["fuzz", "--property", "theorem1_exterior", "--seed", "4", "--emit-instance", "17"]);
    assert_eq!(out.status.code(), Some(0));
    let path = write(&dir, "i.json", &stdout_json(&out));
    let out = polygeom(&["replay", "--instance", s(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["property"], "theorem1_exterior");
    let out = polygeom(&["replay", "--instance", s(&path), "--property", "grace"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "p.json", &json!({"coeffs": [[-1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}));
    let pts = write(&dir, "w.json", &json!({"points": [[0.5, 0.5], [-0.5, 0.2], [0.0, -0.7]]}));
    let ext = write(&dir, "e.json", &json!({"kind": "exterior", "center": [0.0, 0.0], "radius": 1.0}));
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for path in [&a, &b] {
        let out = polygeom(&["plot", "--poly", s(&poly), "--points", s(&pts), "--region", s(&ext), "--svg-out", s(path)]);
        assert_eq!(out.status.code(), Some(0));
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
    // 3 zeros, 2 critical points, 3 points
    assert_eq!(svg.matches(r#"class="marker""#).count(), 8);
    assert!(svg.contains("stroke-dasharray"));
    assert_eq!(polygeom(&["plot", "--points", s(&pts)]).status.code(), Some(2));
}
