mod common;

use std::process::Command;

use common::*;
use emch_cli::format::write_value;
use emch_cli::report::RunReport;
use emch_cli::scene::{parse, ToleranceSpec};
use serde_json::Value;

const BLOCKED_SCENE: &str = r#"{
  "alpha0": {"center": [0, 0], "radius": 1},
  "alpha1": {"center": [0, 0], "radius": 3},
  "delta": {"center": [4, 0], "radius": 1},
  "start": {"circle": {"center": [2, 0], "radius": 1}}
}"#;

const DELTA_TWO: &str = r#"{
  "alpha0": {"center": [0, 0], "radius": 1},
  "alpha1": {"center": [0, 0], "radius": 3},
  "delta": {"center": [0, 0], "radius": 2}
}"#;

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let closing = write_scene(dir.path(), "closing.json", CLOSING_SCENE);
    let blocked = write_scene(dir.path(), "blocked.json", BLOCKED_SCENE);
    let broken = write_scene(dir.path(), "broken.json", r#"{"alpha0": {"center": [0, 0]}}"#);
    let unknown = write_scene(
        dir.path(),
        "unknown.json",
        &CLOSING_SCENE.replace("\"start\"", "\"stray\": 1, \"start\""),
    );
    let closing = closing.to_str().unwrap();

    let ok = emch(&["run", closing, "--steps", "20"]);
    assert_eq!(code(&ok), 0);
    let rep = json(&ok.stdout);
    assert_eq!(rep["closure"]["closed"], true);
    assert_eq!(rep["closure"]["n"], 6);
    assert_eq!(rep["closure"]["winding"], 1);

    assert_eq!(code(&emch(&["run", broken.to_str().unwrap()])), 1);
    assert_eq!(code(&emch(&["validate", unknown.to_str().unwrap()])), 1);
    assert_eq!(code(&emch(&["run", "/nonexistent/scene.json"])), 1);
    assert_eq!(code(&emch(&["frobnicate"])), 1);
    assert_eq!(code(&emch(&["verify", closing, "--suite", "nonsense"])), 1);
    assert_eq!(code(&emch(&["--help"])), 0);

    let b = emch(&["run", blocked.to_str().unwrap()]);
    assert_eq!(code(&b), 2);
    let partial = json(&b.stdout);
    assert_eq!(partial["closure"]["blocked"], "no_second_intersection");
    assert_eq!(partial["series"]["steps"].as_array().unwrap().len(), 0);

    // a tangency tolerance below rounding blocks the series inside the suite
    assert_eq!(
        code(&emch(&["verify", closing, "--suite", "signed", "--geo", "1e-16"])),
        3
    );
}

#[test]
fn every_suite_passes_on_the_closing_scene() {
    let dir = tempfile::tempdir().unwrap();
    let closing = write_scene(dir.path(), "closing.json", CLOSING_SCENE);
    for suite in ["measure", "prop1", "signed", "pencil", "quadric", "cyclic"] {
        let out = emch(&["verify", closing.to_str().unwrap(), "--suite", suite]);
        let table = String::from_utf8(out.stdout.clone()).unwrap();
        assert_eq!(code(&out), 0, "{table}");
        assert!(table.ends_with(&format!("suite {suite}: pass\n")), "{table}");
    }
}

#[test]
fn quadric_suite_reports_the_concentric_member() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "d2.json", DELTA_TWO);
    let out_path = dir.path().join("q.json");
    let out = emch(&[
        "verify",
        scene.to_str().unwrap(),
        "--suite",
        "quadric",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let rep = json(&std::fs::read(&out_path).unwrap());
    let value = |name: &str| {
        rep["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["check"] == name)
            .unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert!((value("a_p") - 10.0).abs() <= 1e-10);
    assert!((value("gamma_radius") - 1.75).abs() <= 1e-10);
}

#[test]
fn validated_scene_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let offset = write_scene(dir.path(), "offset.json", OFFSET_SCENE);
    let first = emch(&["validate", offset.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    let normalized = write_scene(
        dir.path(),
        "normalized.json",
        std::str::from_utf8(&first.stdout).unwrap(),
    );
    let second = emch(&["validate", normalized.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);

    let file = parse(std::str::from_utf8(&first.stdout).unwrap()).unwrap();
    assert_eq!(file.start.unwrap().angle, Some(1.1));
    assert_eq!(file.pencil.unwrap().order, Some(vec![0, 1, 2]));
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let plain = write_scene(dir.path(), "plain.json", CLOSING_SCENE);
    let with_file_tol = write_scene(
        dir.path(),
        "tol.json",
        &CLOSING_SCENE.replace("\"start\"", "\"tolerances\": {\"close\": 1e-7}, \"start\""),
    );
    let validate = |profile: Option<&str>, path: &std::path::Path, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_emch"));
        cmd.arg("validate").arg(path).args(extra);
        match profile {
            Some(p) => cmd.env("EMCH_TOLERANCE_PROFILE", p),
            None => cmd.env_remove("EMCH_TOLERANCE_PROFILE"),
        };
        let out = cmd.output().unwrap();
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out.stdout);
        let t = &v["tolerances"];
        [
            t["geo"].as_f64().unwrap(),
            t["quad"].as_f64().unwrap(),
            t["close"].as_f64().unwrap(),
        ]
    };
    assert_eq!(validate(None, &plain, &[]), [1e-9, 1e-10, 1e-8]);
    assert_eq!(validate(Some("strict"), &plain, &[]), [1e-11, 1e-12, 1e-10]);
    assert_eq!(validate(Some("loose"), &plain, &[]), [1e-7, 1e-8, 1e-6]);
    assert_eq!(validate(Some("strict"), &with_file_tol, &[]), [1e-11, 1e-12, 1e-7]);
    assert_eq!(
        validate(Some("strict"), &with_file_tol, &["--close", "1e-5", "--geo", "1e-8"]),
        [1e-8, 1e-12, 1e-5]
    );

    let bad = Command::new(env!("CARGO_BIN_EXE_emch"))
        .arg("validate")
        .arg(&plain)
        .env("EMCH_TOLERANCE_PROFILE", "sloppy")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);

    let spec = ToleranceSpec {
        geo: None,
        quad: Some(1e-3),
        close: None,
    };
    assert_eq!(spec.over(emch::Tolerances::default()).quad, 1e-3);
}

#[test]
fn scans() {
    let dir = tempfile::tempdir().unwrap();
    let closing = write_scene(dir.path(), "closing.json", CLOSING_SCENE);
    let c = closing.to_str().unwrap();

    let empty = emch(&[
        "scan",
        c,
        "--vary",
        "delta.radius",
        "--from",
        "2",
        "--to",
        "1",
        "--samples",
        "5",
    ]);
    assert_eq!(code(&empty), 0);
    assert_eq!(
        String::from_utf8(empty.stdout).unwrap(),
        "delta.radius,rotation_number,closed,n,winding,status\n"
    );

    let out = emch(&[
        "scan",
        c,
        "--vary",
        "δ.radius",
        "--from",
        "0.5",
        "--to",
        "3.5",
        "--samples",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let status: Vec<String> = reader.records().map(|r| r.unwrap()[5].to_string()).collect();
    assert_eq!(
        status,
        ["not_nested", "invalid", "ok", "ok", "ok", "invalid", "not_nested"]
    );

    let target = emch(&[
        "scan",
        c,
        "--vary",
        "delta.radius",
        "--from",
        "1.2",
        "--to",
        "2.8",
        "--samples",
        "17",
        "--target-n",
        "6",
    ]);
    assert_eq!(code(&target), 0);
    let t = json(&target.stderr);
    assert_eq!(t["found"], true);
    let best = t["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["verified"] == true)
        .unwrap();
    assert!((best["parameter"].as_f64().unwrap() - 3f64.sqrt()).abs() <= 1e-9);

    // the rotation number never exceeds 1/6 for radii 1 and 3
    let none = emch(&[
        "scan",
        c,
        "--vary",
        "delta.radius",
        "--from",
        "1.2",
        "--to",
        "2.8",
        "--samples",
        "17",
        "--target-n",
        "4",
    ]);
    assert_eq!(code(&none), 0);
    assert_eq!(json(&none.stderr)["found"], false);
}

#[test]
fn run_outputs_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let closing = write_scene(dir.path(), "closing.json", CLOSING_SCENE);
    let report = dir.path().join("report.json");
    let figure = dir.path().join("figure.svg");
    let out = emch(&[
        "run",
        closing.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--svg",
        figure.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    let bytes = std::fs::read(&report).unwrap();
    assert_eq!(write_value(&json(&bytes)), bytes);
    let parsed: RunReport = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(parsed.series.steps.len(), 6);
    assert_eq!(parsed.provenance.scene_sha256.len(), 64);

    let rendered = emch(&["render", report.to_str().unwrap()]);
    assert_eq!(code(&rendered), 0);
    let svg = std::fs::read(&figure).unwrap();
    assert_eq!(rendered.stdout, svg);
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));

    let zero = emch(&["run", closing.to_str().unwrap(), "--steps", "0"]);
    assert_eq!(code(&zero), 0);
    let z = json(&zero.stdout);
    assert_eq!(z["series"]["steps"].as_array().unwrap().len(), 0);
    assert_eq!(z["closure"]["closed"], false);

    let garbage = write_scene(dir.path(), "garbage.json", "{\"series\": 3}");
    assert_eq!(code(&emch(&["render", garbage.to_str().unwrap()])), 1);
}
