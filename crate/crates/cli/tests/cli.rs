use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kptrop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kptrop")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn fig12() -> String {
    configs().join("fig12.json").display().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn classify_fig12_text_and_json() {
    let out = kptrop(&["classify", "--config", &fig12()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("type 1"), "{text}");
    assert!(text.contains("word a1 a2 a1 a3 a2 a1"));

    let v = stdout_json(&kptrop(&["classify", "--config", &fig12(), "--format", "json", "--refine-levels"]));
    assert_eq!(v["evolution"]["table_type"], 1);
    assert_eq!(v["table"]["region"], 1);
    assert_eq!(v["evolution"]["steps"].as_array().unwrap().len(), 6);
    assert!(v["refined"].is_object());
}

#[test]
fn tamari_counts_via_json() {
    let v = stdout_json(&kptrop(&["tamari", "--r", "4", "--format", "json", "--chains", "--classes"]));
    assert_eq!(v["nodes"].as_array().unwrap().len(), 14);
    assert_eq!(v["chains"].as_array().unwrap().len(), 9);
    assert_eq!(v["classes"].as_array().unwrap().len(), 6);
}

#[test]
fn dot_outputs() {
    let out = kptrop(&["permutohedron", "--r", "3", "--format", "dot", "--chains"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("// chain").count(), 2);
    let out = kptrop(&["posets", "--kind", "simplex", "--M", "3", "--format", "dot"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("->"));
}

#[test]
fn evolve_writes_frames_at_caption_times() {
    let dir = tempfile::tempdir().unwrap();
    let out = kptrop(&[
        "evolve",
        "--config",
        &fig12(),
        "--times",
        "t=-10,-5.7,-3.6,0,4,10,20",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "svg",
        "--res",
        "40x40",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..7 {
        let svg = std::fs::read_to_string(dir.path().join(format!("frame_{k:02}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, exact: bool| {
        let path = dir.path().join(name);
        let mut args = vec!["plot", "--config", "", "--t", "0", "--bbox=-30,30,-30,30", "--res", "30x30", "--out", path.to_str().unwrap()];
        let cfg = fig12();
        args[2] = &cfg;
        if exact {
            args.push("--exact");
        }
        assert!(kptrop(&args).status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.svg", false), run("b.svg", false));
    assert!(!run("u.svg", true).is_empty());
}

#[test]
fn general_events_and_limits() {
    let v = stdout_json(&kptrop(&["general", "--events"]));
    assert_eq!(v["events"]["t0"], "0");
    assert_eq!(v["events"]["delta_t"]["text"], "16/15·log(5)");
    let spec = configs().join("otype_wedge.json");
    let cfg = configs().join("otype_fig17.json");
    let v = stdout_json(&kptrop(&["general", "--spec", spec.to_str().unwrap(), "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    assert_eq!(v["regular"], true);
    let v = stdout_json(&kptrop(&["general", "--spec", spec.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--limit", "2"]));
    // the 23 term collapses; 13, 14, 24 survive
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    // invalid input
    assert_eq!(kptrop(&["classify", "--config", "/does/not/exist.json"]).status.code(), Some(1));
    assert_eq!(kptrop(&["tamari"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"M": 2, "p": [0.5, 1, 2], "c": ["0", "0", "0"]}"#).unwrap();
    assert_eq!(kptrop(&["classify", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&bad, r#"{"M": 2, "p": ["1", "1", "2"], "c": ["0", "0", "0"]}"#).unwrap();
    assert_eq!(kptrop(&["classify", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(kptrop(&["plot", "--config", &fig12(), "--t", "0", "--bbox", "1,0,0,1", "--out", "x.svg"]).status.code(), Some(1));
    assert_eq!(kptrop(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_suites_pass() {
    let out = kptrop(&["check", "--suite", "tables", "--cases", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("0 mismatches"));
    let out = kptrop(&["check", "--suite", "braid"]);
    assert!(out.status.success());
    let out = kptrop(&["check", "--suite", "visibility", "--cases", "1", "--seed", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
