//! End-to-end tests of the compiled binary: file round trips, report
//! shape, exit codes, tolerance flags, and the seed environment override.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use xkit::objects::{apply_postprocessing, random_povm, random_stochastic_map, Povm};
use xkit::schema::{self, Document, PovmDoc};

fn xkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("XKIT_SEED")
        .output()
        .expect("binary runs")
}

fn report(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let doc: Value = serde_json::from_slice(&output.stdout).expect("stdout is one document");
    assert_eq!(doc["kind"], "report");
    assert_eq!(doc["schema_version"], 1);
    doc
}

fn write_povm(dir: &Path, name: &str, m: &Povm) -> PathBuf {
    let path = dir.join(name);
    schema::write_document(&path, &Document::Povm(PovmDoc::from_povm(m))).unwrap();
    path
}

#[test]
fn full_pipeline_from_generation_to_information() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    report(&xkit(dir, &["random", "povm", "-d", "2", "-o", "3", "--seed", "42", "m.json"]));
    report(&xkit(dir, &["random", "ensemble", "-d", "2", "-k", "3", "--seed", "5", "e.json"]));

    let woi_report = report(&xkit(dir, &["woi", "m.json"]));
    let w = woi_report["results"]["woi"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&w));
    assert_eq!(woi_report["results"]["w_star"], woi_report["results"]["woi"]);
    assert_eq!(woi_report["inputs"][0]["path"], "m.json");

    let game = report(&xkit(dir, &["game", "e.json", "m.json"]));
    let ratio = game["results"]["ratio"].as_f64().unwrap();
    assert!(ratio >= 1.0 - w - 1e-7);
    assert_eq!(game["results"]["degenerate"], Value::Bool(false));

    let optimal = report(&xkit(dir, &["optimal-game", "m.json", "--output", "opt.json"]));
    assert!((optimal["results"]["ratio"].as_f64().unwrap() - (1.0 - w)).abs() <= 1e-7);
    assert!(optimal["results"]["equality_gap"].as_f64().unwrap() <= 1e-7);
    match schema::load_document(&dir.join("opt.json")).unwrap() {
        Document::Ensemble(_) => {}
        other => panic!("expected an ensemble file, found {}", other.kind_name()),
    }

    let best_game = report(&xkit(dir, &["game", "opt.json", "m.json"]));
    let best_ratio = best_game["results"]["ratio"].as_f64().unwrap();
    assert!((best_ratio - (1.0 - w)).abs() <= 1e-7);

    let info = report(&xkit(dir, &["info", "m.json", "--direct", "--trials", "50"]));
    assert!(info["results"]["gap"].as_f64().unwrap() <= 1e-6);
    let expected = -(1.0 - w).log2();
    let reported = info["results"]["excludible_information"]["finite"].as_f64().unwrap();
    assert!((reported - expected).abs() <= 1e-9);
}

#[test]
fn simulable_verdicts_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let z = write_povm(dir, "z.json", &Povm::qubit_z());
    let x = write_povm(dir, "x.json", &Povm::qubit_x());

    let refused = report(&xkit(
        dir,
        &[
            "simulable",
            z.to_str().unwrap(),
            x.to_str().unwrap(),
            "--witness",
            "--restarts",
            "10",
            "--seed",
            "3",
        ],
    ));
    assert_eq!(refused["results"]["simulable"], Value::Bool(false));
    assert!(refused["results"]["violation"].as_f64().unwrap() >= 0.1);
    assert_eq!(refused["results"]["witness"]["kind"], Value::Null); // embedded doc, no tag

    let m = random_povm(2, 4, 77).unwrap();
    let q = random_stochastic_map(4, 2, 78);
    let n = apply_postprocessing(&m, &q).unwrap();
    let m_path = write_povm(dir, "m.json", &m);
    let n_path = write_povm(dir, "n.json", &n);
    let granted = report(&xkit(
        dir,
        &["simulable", m_path.to_str().unwrap(), n_path.to_str().unwrap()],
    ));
    assert_eq!(granted["results"]["simulable"], Value::Bool(true));
    assert!(granted["results"]["residual"].as_f64().unwrap() <= 1e-6);

    // the grid oracle agrees that no post-processing of Z approaches X
    assert!(common::zx_best_reproduction_residual(60) >= 0.49);
}

#[test]
fn verify_command_reports_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = xkit(
        dir.path(),
        &["verify", "result2", "--trials", "10", "--seed", "21", "--jobs", "2"],
    );
    let doc = report(&out);
    assert_eq!(doc["command"], "verify");
    assert_eq!(doc["results"]["target"], "result2");
    assert_eq!(doc["results"]["pass"], Value::Bool(true));
    let equality = &doc["results"]["suites"]["result2"]["equality"];
    assert_eq!(equality["checked"], 10);
    assert_eq!(equality["passed"], 10);
}

#[test]
fn failure_exit_codes_are_one() {
    let dir = tempfile::tempdir().unwrap();
    let dir_path = dir.path();
    std::fs::write(dir_path.join("junk.json"), "{\"oops\": 1}").unwrap();

    for args in [
        vec!["woi", "junk.json"],
        vec!["woi", "missing.json"],
        vec!["verify", "--dims", "9"],
        vec!["random", "povm", "-d", "0", "out.json"],
    ] {
        let out = xkit(dir_path, &args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
        assert!(out.stdout.is_empty(), "no report on failure for {args:?}");
    }

    // wrong document kind for the subcommand
    report(&xkit(dir_path, &["random", "ensemble", "-d", "2", "-k", "2", "e.json"]));
    let out = xkit(dir_path, &["woi", "e.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_environment_variable_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let dir_path = dir.path();
    let flagged = xkit(dir_path, &["random", "povm", "-d", "2", "-o", "3", "--seed", "99", "a.json"]);
    assert!(flagged.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_xkit"))
        .args(["random", "povm", "-d", "2", "-o", "3", "--seed", "1", "b.json"])
        .current_dir(dir_path)
        .env("XKIT_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(dir_path.join("a.json")).unwrap(),
        std::fs::read(dir_path.join("b.json")).unwrap()
    );

    let bad = Command::new(env!("CARGO_BIN_EXE_xkit"))
        .args(["random", "povm", "-d", "2", "c.json"])
        .current_dir(dir_path)
        .env("XKIT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn tolerance_flags_gate_validation() {
    let dir = tempfile::tempdir().unwrap();
    let dir_path = dir.path();
    // complete POVM whose first effect has a 1e-8 Hermiticity defect
    let doc = r#"{
        "kind": "povm",
        "schema_version": 1,
        "dim": 2,
        "effects": [
            [[[0.5, 0.0], [0.0, 0.00000001]], [[0.0, 0.0], [0.5, 0.0]]],
            [[[0.5, 0.0], [0.0, -0.00000001]], [[0.0, 0.0], [0.5, 0.0]]]
        ]
    }"#;
    std::fs::write(dir_path.join("skewed.json"), doc).unwrap();

    let strict = xkit(dir_path, &["woi", "skewed.json"]);
    assert_eq!(strict.status.code(), Some(1));

    let relaxed = xkit(dir_path, &["woi", "skewed.json", "--herm-tol", "1e-6"]);
    let doc = report(&relaxed);
    assert_eq!(doc["diagnostics"]["tolerances"]["herm"].as_f64().unwrap(), 1e-6);
}
