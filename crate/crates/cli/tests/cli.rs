use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const THREE_LEVEL: &str = r#"{
  "version": 1,
  "hilbert_dim": 3,
  "dfs": [0, 1],
  "hamiltonian": [[0, 0, 0], [0, 0, 0], [0, 0, DELTA]],
  "jumps": [[[0, 0, 1.4142135623730951], [0, 0, 0], [0, 0, 0]]],
  "perturbation": {"f": [F]}
}"#;

const F_UL: &str = "[[0, 0.2, 0], [0, 0, 0], [0, 0, 0]]";

fn three_level(delta: f64, f: &str) -> String {
    THREE_LEVEL
        .replace("DELTA", &delta.to_string())
        .replace("F", f)
}

fn ejof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ejof"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn load(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs `args` with `--out` into `dir` and returns exit code and report.
fn run(dir: &TempDir, args: &[&str]) -> (i32, Value) {
    let out = dir.path().join("report.json");
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", s(&out)]);
    let o = ejof(&all);
    let c = code(&o);
    assert!(c <= 1, "exit {c}: {}", stderr(&o));
    (c, load(&out))
}

fn entry(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn frob(m: &Value) -> f64 {
    m.as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter())
        .map(|z| {
            let (re, im) = entry(z);
            re * re + im * im
        })
        .sum::<f64>()
        .sqrt()
}

fn verdict<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"].as_str().unwrap().contains(name))
        .unwrap_or_else(|| panic!("no verdict {name}"))
}

#[test]
fn effective_reports_three_level_jump() {
    let dir = TempDir::new().unwrap();
    let file = put(&dir, "tl.json", &three_level(1.0, F_UL));
    let (c, r) = run(&dir, &["effective", s(&file)]);
    assert_eq!(c, 0);
    let f = &r["result"]["f_eff"][0];
    let (re, im) = entry(&f[0][1]);
    assert!(
        (re - 0.1).abs() < 1e-12 && (im - 0.1).abs() < 1e-12,
        "{re} {im}"
    );
    for (i, j) in [(0, 0), (1, 0), (1, 1)] {
        assert_eq!(entry(&f[i][j]), (0.0, 0.0));
    }
    assert!(r["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn malformed_row_exits_2_with_key_path() {
    let dir = TempDir::new().unwrap();
    let bad = three_level(1.0, F_UL).replace("[0, 0, 0], [0, 0, 1]]", "[0, 0], [0, 0, 1]]");
    let file = put(&dir, "bad.json", &bad);
    let out_path = dir.path().join("r.json");
    let o = ejof(&["effective", s(&file), "--out", s(&out_path)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("hamiltonian[1]"), "{}", stderr(&o));
    assert!(!out_path.exists());

    let file = put(&dir, "syntax.json", "{\"version\": 1,\n \"dfs\": [0,, 1]}");
    let o = ejof(&["effective", s(&file)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_2() {
    let o = ejof(&["effective", "/nonexistent/problem.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_structure_needs_force() {
    let dir = TempDir::new().unwrap();
    // A weak drive between |0⟩ and |e⟩ breaks the block structure.
    let bad = three_level(1.0, F_UL).replace(
        "[[0, 0, 0], [0, 0, 0], [0, 0, 1]]",
        "[[0, 0, 1e-8], [0, 0, 0], [1e-8, 0, 1]]",
    );
    let file = put(&dir, "bad.json", &bad);
    let o = ejof(&["effective", s(&file)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let (c, r) = run(&dir, &["effective", s(&file), "--force"]);
    assert_eq!(c, 0);
    assert_eq!(r["result"]["forced"], Value::Bool(true));
    assert!(r["result"]["l_eff"]["general"].is_array());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let file = put(
        &dir,
        "u.json",
        r#"{"version": 1, "scenario": {"name": "universal", "targets": "random"}, "seed": 17}"#,
    );
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&ejof(&["effective", s(&file), "--out", s(&a)])), 0);
    assert_eq!(code(&ejof(&["effective", s(&file), "--out", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let a = dir.path().join("va.json");
    let b = dir.path().join("vb.json");
    let args = ["verify", "--random", "2", "3", "12", "7", "--out"];
    assert_eq!(code(&ejof(&[&args[..], &[s(&a)]].concat())), 0);
    assert_eq!(code(&ejof(&[&args[..], &[s(&b)]].concat())), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn verify_random_hundred_trials() {
    let dir = TempDir::new().unwrap();
    let plots = dir.path().join("plots");
    let (c, r) = run(
        &dir,
        &[
            "verify",
            "--random",
            "2",
            "4",
            "100",
            "42",
            "--plot-data",
            s(&plots),
        ],
    );
    assert_eq!(c, 0);
    for v in r["verdicts"].as_array().unwrap() {
        assert!(v["residual"].as_f64().unwrap() <= 1e-9, "{v}");
    }
    let csv = std::fs::read_to_string(plots.join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
}

#[test]
fn verify_zero_trials_is_an_empty_pass() {
    let dir = TempDir::new().unwrap();
    let (c, r) = run(&dir, &["verify", "--random", "2", "4", "0", "42"]);
    assert_eq!(c, 0);
    assert_eq!(r["pass"], Value::Bool(true));
}

#[test]
fn verify_violating_family_withholds_cancellation() {
    let dir = TempDir::new().unwrap();
    // Adds a raising piece |e⟩⟨1| that the recovery cannot undo.
    let file = put(
        &dir,
        "v.json",
        &three_level(0.0, "[[0, 0.2, 0], [0, 0, 0], [0, 0.1, 0]]"),
    );
    let (c, r) = run(&dir, &["verify", s(&file)]);
    assert_eq!(c, 0);
    assert_eq!(r["cancellation"]["claimed"], Value::Bool(false));
    assert!(!r["cancellation"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(verdict(&r, "dual-route").pass());
    assert!(r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| !v["name"].as_str().unwrap().contains("cancellation")));

    // One jump emptying both decaying levels is surjective onto the DFS.
    let file = put(
        &dir,
        "ok.json",
        r#"{
          "version": 1,
          "hilbert_dim": 4,
          "dfs": [0, 1],
          "hamiltonian": [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
          "jumps": [[[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]],
          "perturbation": {"f": [[[0, 0.1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]]}
        }"#,
    );
    let (c, r) = run(&dir, &["verify", s(&file)]);
    assert_eq!(c, 0);
    assert_eq!(r["cancellation"]["claimed"], Value::Bool(true));
}

trait Pass {
    fn pass(&self) -> bool;
}

impl Pass for Value {
    fn pass(&self) -> bool {
        self["pass"].as_bool().unwrap()
    }
}

#[test]
fn scenario_three_level_dark() {
    let dir = TempDir::new().unwrap();
    let (c, r) = run(
        &dir,
        &[
            "scenario",
            "three-level",
            "--delta",
            "0",
            "--Gamma",
            "2",
            "--gamma",
            "0.04",
        ],
    );
    assert_eq!(c, 0);
    assert!(frob(&r["result"]["f_eff"][0]) <= 1e-12);
}

#[test]
fn scenario_coherent_cancel() {
    let dir = TempDir::new().unwrap();
    let (c, r) = run(&dir, &["scenario", "coherent-cancel", "--seed", "5"]);
    assert_eq!(c, 0);
    let v = verdict(&r, "F_eff");
    assert!(v.pass());
    for f in r["result"]["f_eff"].as_array().unwrap() {
        assert!(frob(f) <= 1e-11);
    }
}

#[test]
fn scenario_cancellation_and_universal() {
    let dir = TempDir::new().unwrap();
    let (c, _) = run(&dir, &["scenario", "cancellation", "--seed", "5"]);
    assert_eq!(c, 0);
    let (c, r) = run(
        &dir,
        &["scenario", "universal", "--seed", "5", "--targets", "pauli"],
    );
    assert_eq!(c, 0);
    let v = verdict(&r, "generator match");
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn unknown_scenario_lists_names() {
    let o = ejof(&["scenario", "four-level"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    for name in [
        "three-level",
        "cancellation",
        "coherent-cancel",
        "universal",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn qec_repetition_miscalibrations() {
    let dir = TempDir::new().unwrap();
    let eps = 0.01f64;
    for m in ["X", "Z"] {
        let (c, r) = run(&dir, &["qec", "repetition", "--miscal", m, "--eps", "0.01"]);
        assert_eq!(c, 0, "{m}");
        assert_eq!(r["verdict"], "robust");
        let n = &r["l_eff"];
        assert!(
            n["general_norm"].as_f64().unwrap() <= 1e-10 * eps * eps,
            "{m}"
        );
        assert!(
            n["closed_norm"].as_f64().unwrap() <= 1e-10 * eps * eps,
            "{m}"
        );
    }
    let (c, r) = run(
        &dir,
        &["qec", "repetition", "--miscal", "Y", "--eps", "0.01"],
    );
    assert_eq!(c, 0);
    assert_eq!(r["verdict"], "not robust");
    assert!(r["l_eff"]["general_norm"].as_f64().unwrap() > 1e-6);

    assert_eq!(code(&ejof(&["qec", "surface", "--miscal", "X"])), 2);
}

#[test]
fn evolve_three_level_converges() {
    let dir = TempDir::new().unwrap();
    let file = put(&dir, "tl.json", &three_level(2.0, F_UL));
    let (c, r) = run(&dir, &["evolve", s(&file), "--mode", "second-order"]);
    assert_eq!(c, 0);
    let slope = r["fit"]["overall"]["slope"].as_f64().unwrap();
    assert!(slope >= 0.7, "{slope}");
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("epsilon,tau,state_index,trace_distance"));
    assert_eq!(csv.lines().count(), 1 + 3 * 4 * 3);
}

#[test]
fn evolve_without_perturbation_is_all_zero() {
    let dir = TempDir::new().unwrap();
    let zero = "[[0, 0, 0], [0, 0, 0], [0, 0, 0]]";
    let file = put(&dir, "z.json", &three_level(1.0, zero));
    let (c, r) = run(&dir, &["evolve", s(&file), "--mode", "first-order"]);
    assert_eq!(c, 0);
    for row in r["rows"].as_array().unwrap() {
        assert_eq!(row["trace_distance"].as_f64().unwrap(), 0.0, "{row}");
    }
}

#[test]
fn evolve_repetition_z_has_no_secular_decay() {
    let dir = TempDir::new().unwrap();
    let file = put(
        &dir,
        "rep.json",
        r#"{"version": 1, "scenario": {"name": "repetition", "miscal": "Z", "eps": 1.0}}"#,
    );
    let (c, r) = run(&dir, &["evolve", s(&file), "--mode", "second-order"]);
    assert_eq!(c, 0);
    assert_eq!(r["drift"]["pass"], Value::Bool(true));
    for row in r["rows"].as_array().unwrap() {
        let e = row["epsilon"].as_f64().unwrap();
        assert!(
            row["trace_distance"].as_f64().unwrap() <= 10.0 * e * e,
            "{row}"
        );
    }
}

#[test]
fn evolve_rejects_bad_sweeps() {
    let dir = TempDir::new().unwrap();
    let file = put(&dir, "tl.json", &three_level(1.0, F_UL));
    let o = ejof(&[
        "evolve",
        s(&file),
        "--mode",
        "first-order",
        "--eps",
        "0.1,-1",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = ejof(&["evolve", s(&file)]);
    assert_eq!(code(&o), 2);
}
