use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn wmflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmflat")).args(args).output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn classify_exit_codes() {
    let o = wmflat(&["classify", "--triangle", "1/2,1/4,1/4"]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(json_of(&o)["reason"], "INTEGRABLE");
    let o = wmflat(&["classify", "--triangle", "1/5,1/5,3/5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["weakly_mixing"], true);
    assert_eq!(v["k"], 5);
    let o = wmflat(&["classify", "--exact", "--triangle", "2/3,1/6,1/6"]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(json_of(&o)["reason"], "ALMOST_INTEGRABLE");
}

#[test]
fn non_closing_polygon_is_bad_input() {
    let p = tmp("not_closed.json");
    std::fs::write(&p, r#"{"angles": [[1,2],[1,2],[1,2],[1,2]], "lengths": ["1", "2", "1", "1"]}"#).unwrap();
    let o = wmflat(&["validate", "--polygon", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOT_CLOSED"));
}

#[test]
fn usage_errors() {
    assert_eq!(wmflat(&["classify", "--triangle", "1/3,1/3,1/3", "--frobnicate"]).status.code(), Some(64));
    assert_eq!(wmflat(&["classify"]).status.code(), Some(64));
    assert_eq!(wmflat(&[]).status.code(), Some(64));
    let o = wmflat(&["diagnose", "--builtin", "square-torus", "--mode", "correlation"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert_eq!(wmflat(&["--schema"]).status.code(), Some(0));
}

#[test]
fn unfold_round_trips_through_surface_input() {
    let o = wmflat(&["unfold", "--triangle", "1/2,1/3,1/6"]);
    assert!(o.status.success());
    let p = tmp("unfolded.json");
    std::fs::write(&p, &o.stdout).unwrap();
    let v = json_of(&wmflat(&["validate", "--surface", p.to_str().unwrap()]));
    assert_eq!(v["genus"], 1);
    assert_eq!(v["cells"], 12);
    let per = json_of(&wmflat(&["periods", "--surface", p.to_str().unwrap()]));
    assert_eq!(per["genus"], 1);
    assert_eq!(per["re"].as_array().unwrap().len(), 2);
    let o = wmflat(&["classify", "--surface", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
}

#[test]
fn rigidity_on_golden_torus() {
    let o = wmflat(&["rigidity", "--builtin", "square-torus", "--direction", "1,phi", "--L", "34"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_of(&o);
    assert_eq!(v["verification"]["passed"], true);
    let (big_v, im) = (v["V"].as_f64().unwrap(), v["pairings"]["im"].as_f64().unwrap());
    assert!((big_v - im).abs() < 1e-9 * big_v);
    let o = wmflat(&["rigidity", "--exact", "--builtin", "square-torus", "--direction", "1,phi", "--L", "21"]);
    let v = json_of(&o);
    assert_eq!(v["V"], v["pairings"]["im"]);
}

#[test]
fn iet_csv_shape() {
    let o = wmflat(&["iet", "--builtin", "square-torus", "--direction", "1,phi", "--steps", "5"]);
    let s = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "step,top,rauzy_steps,matrix,lengths");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,,0,1 0;0 1,"));
}

#[test]
fn diagnose_modes() {
    let o = wmflat(&["diagnose", "--builtin", "square-torus", "--mode", "tracker", "--direction", "1,phi", "--steps", "10"]);
    assert!(o.status.success());
    let summary: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(summary["steps"], 10);
    let sp = tmp("exclusion_summary.json");
    let o = wmflat(&[
        "diagnose", "--builtin", "square-torus", "--mode", "exclusion", "--direction", "1,phi", "--L", "21,55",
        "--summary", sp.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(&sp).unwrap()).unwrap();
    assert_eq!(summary["replay"]["violations"], 0);
}

fn correlation_csv() -> Vec<u8> {
    let o = wmflat(&[
        "diagnose", "--builtin", "double-pentagon", "--mode", "correlation", "--seed", "7", "--samples", "200",
        "--replicates", "4", "--T", "10,100", "--steps-per-segment", "50", "--directions", "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

#[test]
fn seeded_diagnostics_are_byte_identical() {
    let a = correlation_csv();
    assert_eq!(a, correlation_csv());
    assert!(String::from_utf8(a).unwrap().starts_with("direction,T,value,error\n"));
}

#[test]
fn corpus_matches_golden_table() {
    let golden = include_str!("golden/corpus.json");
    let o = wmflat(&["corpus"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden);
}

#[test]
fn radical_directions_parse() {
    let o = wmflat(&["iet", "--builtin", "square-torus", "--direction", "1,sqrt(2)", "--steps", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = String::from_utf8(o.stdout).unwrap();
    let first: Vec<f64> = s.lines().nth(1).unwrap().rsplit(',').next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert!((first[0] - (1.0 - 0.5f64.sqrt())).abs() < 1e-9);
    assert!((first.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert_eq!(wmflat(&["iet", "--builtin", "square-torus", "--direction", "1,sqrt(", "--steps", "1"]).status.code(), Some(65));
}
