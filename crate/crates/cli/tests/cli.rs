use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn algebroid(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_algebroid")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, text) = algebroid(args);
    (code, serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")))
}

fn fixture(dir: &TempDir, name: &str) -> PathBuf {
    let (code, text) = algebroid(&["fixture", name]);
    assert_eq!(code, 0, "fixture {name}");
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (code, r) = report(&["validate", s(&fixture(&dir, "heis3"))]);
    assert_eq!((code, r["status"].as_str()), (0, Some("ok")));

    let (code, r) = report(&["validate", s(&fixture(&dir, "heis3-corrupt"))]);
    assert_eq!(code, 1);
    let failures = r["results"]["algebra"]["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f["kind"] == "jacobi" && f["indices"] == serde_json::json!([0, 1, 2])));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let (code, r) = report(&["validate", s(&empty)]);
    assert_eq!(code, 2);
    assert_eq!(r["results"]["error"]["kind"], "parse");

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n  \"kind\": \"algebra\",\n  \"rank\": ?\n}").unwrap();
    let (code, r) = report(&["validate", s(&broken)]);
    assert_eq!(code, 2);
    assert_eq!(r["results"]["error"]["line"], 3);
}

#[test]
fn obstruction_of_heis3_base_pair() {
    let dir = TempDir::new().unwrap();
    let (code, r) = report(&["obstruction", s(&fixture(&dir, "heis3-base"))]);
    assert_eq!(code, 0);
    let res = &r["results"];
    assert_eq!(res["lambda"]["values"], serde_json::json!(["1"]));
    assert_eq!(res["class_is_zero"], true);
    assert!(res["coboundary_witness"].is_object());

    let (code, r) = report(&["obstruction", s(&fixture(&dir, "split"))]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["class_is_zero"], true);
}

#[test]
fn nerve_obstruction_reports_cocycle_residuals() {
    let dir = TempDir::new().unwrap();
    let (code, r) = report(&["obstruction", s(&fixture(&dir, "heis-triangle"))]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["cocycle_residuals"], serde_json::json!([[], [], [], []]));
    assert!(r["results"]["trivialization"].is_object());
}

#[test]
fn spectral_tables() {
    let dir = TempDir::new().unwrap();
    let (code, r) = report(&["spectral", s(&fixture(&dir, "heis3-over-plane")), "--pages", "3"]);
    assert_eq!(code, 0);
    let pages = r["results"]["pages"].as_array().unwrap();
    assert_eq!(pages.len(), 4);
    assert_eq!(pages[2]["nonzero_differentials"], serde_json::json!(["0,1"]));
    assert_eq!(pages[2]["totals"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(r["results"]["convergence"]["e_infinity_totals"], serde_json::json!([1, 2, 2, 1]));

    let (code, r) = report(&["spectral", s(&fixture(&dir, "split-abelian")), "--pages", "2"]);
    assert_eq!(code, 0);
    for page in r["results"]["pages"].as_array().unwrap().iter().skip(1) {
        assert_eq!(page["nonzero_differentials"], serde_json::json!([]));
    }
}

#[test]
fn atiyah_reports() {
    let (code, r) = report(&["atiyah-p1", "--degree", "0", "--truncation", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["hypercohomology"]["direct"], serde_json::json!([1, 1, 1, 1]));

    let (code, r) = report(&["atiyah-p1", "--degree", "3", "--truncation", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["hypercohomology"]["direct"], serde_json::json!([1, 0, 0, 1]));
    assert_eq!(r["results"]["long_exact_sequence"]["chase_multiplier"], "3");
    assert_eq!(r["results"]["long_exact_sequence"]["cup_multiplier"], "3");
    assert_eq!(r["results"]["stability"]["stable"], true);

    let (code, r) = report(&["atiyah-p1", "--degree", "-2", "--truncation", "4"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["gluing"]["chern_coordinate"], "-2");

    let (code, r) = report(&["atiyah-p1", "--degree", "3", "--truncation", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r["results"]["error"]["kind"], "truncation_unstable");
}

#[test]
fn classification_against_another_extension() {
    let dir = TempDir::new().unwrap();
    let heis = fixture(&dir, "heis3-over-plane");
    let split = fixture(&dir, "split-abelian");
    let (code, r) = report(&["classify", s(&heis), "--against", s(&split)]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["equivalent"], false);
    assert_eq!(r["results"]["h2"]["dim"], 1);
    let (_, r) = report(&["classify", s(&heis), "--against", s(&heis)]);
    assert_eq!(r["results"]["equivalent"], true);

    let (code, r) = report(&["classify", s(&fixture(&dir, "plane-line"))]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["extensions_exist"], true);
    assert_eq!(r["results"]["torsor_h2"]["dim"], 1);
}

#[test]
fn reports_are_byte_stable_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = fixture(&dir, "heis3-over-plane");
    let (_, a) = algebroid(&["spectral", s(&path)]);
    let (_, b) = algebroid(&["spectral", s(&path)]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", a);
    assert!(v["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn seeded_fixtures_are_reproducible() {
    let (_, a) = algebroid(&["--seed", "7", "fixture", "random-nerve"]);
    let (_, b) = algebroid(&["fixture", "random-nerve", "--seed", "7"]);
    let (_, c) = algebroid(&["fixture", "random-nerve", "--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let (code, _) = algebroid(&["fixture", "no-such-thing"]);
    assert_eq!(code, 2);
}
