use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn wittkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittkit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const WORKSPACE: &str = r#"{
  "posets": {"S": {"divisors_of": 2}, "odd": {"set": [1, 3]}},
  "maps": {
    "sum": {"fold": "S"},
    "double": {"mult": {"poset": "odd", "n": 2}}
  },
  "vectors": {
    "ones": {"poset": {"source_of": "sum"}, "ring": "Z",
             "coords": {"1": 1, "2": 1, "3": 1, "4": 1}},
    "x": {"poset": "odd", "ring": {"kind": "Poly"}, "ghost": {"1": "x_1", "3": "x_3"}}
  },
  "bispans": {
    "add": {"legs": [{"kind": "T", "map": "sum"}]},
    "norm2": {"legs": [{"kind": "N", "map": "double"}]},
    "empty": {"legs": []}
  }
}"#;

#[test]
fn validate_divisor_poset() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "p.json", r#"{"divisors_of": 6}"#);
    let o = wittkit(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["valid"], true);
    assert_eq!(j["elements"], 4);
}

#[test]
fn validate_reports_the_violated_axiom() {
    let d = TempDir::new().unwrap();
    let f = write(
        &d,
        "p.json",
        r#"{"elements": [{"id": 1, "norm": 1}, {"id": 2, "norm": 3}, {"id": 3, "norm": 2}],
            "divides": [[1, 2], [2, 3]]}"#,
    );
    let o = wittkit(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let j = stdout_json(&o);
    assert_eq!(j["valid"], false);
    assert!(j["error"].as_str().unwrap().contains("axiom 1"));
}

#[test]
fn validate_reports_non_monotone_maps() {
    let d = TempDir::new().unwrap();
    let f = write(
        &d,
        "m.json",
        r#"{"source": {"divisors_of": 2}, "target": {"set": [1, 2]}, "assign": [[1, 2], [2, 1]]}"#,
    );
    let o = wittkit(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["error"]
        .as_str()
        .unwrap()
        .contains("not monotone"));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "p.json", "{\n  \"divisors_of\": ,\n}");
    let o = wittkit(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn eval_fold_adds() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&["-w", ws.to_str().unwrap(), "eval", "add", "ones"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["coords"]["1"], "2");
    assert_eq!(j["coords"]["2"], "1");
}

#[test]
fn eval_norm_in_ghost_coordinates() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&[
        "-w",
        ws.to_str().unwrap(),
        "--text",
        "eval",
        "norm2",
        "x",
        "--ghost",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "1: x_1\n2: x_1^2\n3: x_3\n6: x_3^2\n"
    );
}

#[test]
fn eval_empty_word_echoes() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&["-w", ws.to_str().unwrap(), "eval", "empty", "ones"]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["coords"].as_object().unwrap().len(), 4);
    assert!(j["coords"].as_object().unwrap().values().all(|v| v == "1"));
}

#[test]
fn eval_names_the_failing_leg() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&["-w", ws.to_str().unwrap(), "eval", "norm2", "ones"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("leg 0"));
}

#[test]
fn eval_accepts_files() {
    let d = TempDir::new().unwrap();
    let w = write(
        &d,
        "w.json",
        r#"{"legs": [{"kind": "R", "map": {"inclusion": [{"set": [1]}, {"divisors_of": 2}]}}]}"#,
    );
    let v = write(
        &d,
        "v.json",
        r#"{"poset": {"divisors_of": 2}, "ring": {"kind": "Zmod", "m": 5}, "coords": {"1": "7", "2": "1"}}"#,
    );
    let o = wittkit(&["--text", "eval", w.to_str().unwrap(), v.to_str().unwrap()]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "1: 2\n");
}

#[test]
fn show_prints_the_hasse_diagram() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&["-w", ws.to_str().unwrap(), "--text", "show", "S"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("1 (id 1, |1|=1) -> [2]"));
}

#[test]
fn universal_sum_polynomials() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&[
        "-w",
        ws.to_str().unwrap(),
        "universal",
        "sum",
        "--kind",
        "transfer",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["formulas"]["1"], "a_1 + a_3");
    assert_eq!(j["formulas"]["2"], "-a_1*a_3 + a_2 + a_4");
}

#[test]
fn verify_is_deterministic_and_prints_its_seed() {
    let args = [
        "verify", "dwork", "--size", "4", "--seed", "7", "--trials", "40",
    ];
    let a = wittkit(&args);
    let b = wittkit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let j = stdout_json(&a);
    assert_eq!(j["seed"], 7);
    assert_eq!(j["failed"], 0);
}

#[test]
fn verify_tn_holds() {
    let o = wittkit(&["verify", "tn", "--size", "3", "--trials", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["failed"], 0);
}

#[test]
fn verify_nr_marks_the_missing_pullback() {
    let o = wittkit(&["--text", "verify", "nr", "--size", "3", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("expected:"));
    assert!(text.contains("does not exist"));
}

#[test]
fn verify_remaining_suites_pass() {
    for suite in ["rt", "bispan", "roundtrip"] {
        let o = wittkit(&["verify", suite, "--size", "3", "--trials", "20"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
}

#[test]
fn unknown_names_are_validation_failures() {
    let d = TempDir::new().unwrap();
    let ws = write(&d, "ws.json", WORKSPACE);
    let o = wittkit(&["-w", ws.to_str().unwrap(), "show", "nope.json"]);
    assert_eq!(o.status.code(), Some(1));
}
