use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ewgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewgeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn repo_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(name)
}

#[test]
fn toda_example_passes() {
    let o = ewgeom(&[
        "verify", "--family", "hypercr-toda", "--h", "poly:0.5,1", "--samples", "20", "--seed", "7",
        "--tol", "1e-8",
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o));
}

#[test]
fn hyperbolic_pedersen_records_vanishing_weyl() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = ewgeom(&[
        "verify", "--family", "pedersen", "--m", "0", "--tol", "1e-8", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let r = read_json(&out);
    assert!(r["maxima"]["weyl_norm2"].as_f64().unwrap() < 1e-20);
    for key in ["family", "params", "ledger", "points", "maxima", "pass"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["params"]["seed"], "0xe3");
    assert_eq!(r["params"]["samples"], "20");
}

#[test]
fn negative_h_is_a_domain_error() {
    let o = ewgeom(&[
        "verify", "--family", "hypercr-toda", "--h", "poly:-5", "--z-min", "0.1", "--z-max", "1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(text(&o).contains("coverage"), "{}", text(&o));
}

#[test]
fn bad_holo_string_reports_its_column() {
    let o = ewgeom(&["verify", "--family", "sfk", "--h", "poly:1,2+", "--f", "const:1"]);
    assert_eq!(code(&o), 2);
    assert!(text(&o).contains("column"), "{}", text(&o));
    let o = ewgeom(&["verify", "--family", "toda"]);
    assert_eq!(code(&o), 2);
    let o = ewgeom(&["verify", "--family", "berger"]);
    assert_eq!(code(&o), 2, "missing parameter");
}

#[test]
fn unattainable_tolerance_fails_and_names_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.cfg");
    fs::write(&cfg, "[berger]\na = 0.6\ntol = 1e-16\nsamples = 5\n").unwrap();
    let out = dir.path().join("r.json");
    let o = ewgeom(&["report-all", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", text(&o));
    let r = read_json(&out);
    assert_eq!(r["pass"], false);
    let failing = r["suites"]["berger#1"]["failing"].as_array().unwrap();
    assert!(failing.iter().any(|v| v == "einstein_weyl"), "{failing:?}");
}

#[test]
fn berger_only_config_has_only_berger_sections() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.cfg");
    fs::write(&cfg, "samples = 4\n[berger]\na = 0.3\n\n[berger]\na = 0.9 # second\n").unwrap();
    let out = dir.path().join("r.json");
    let o = ewgeom(&["report-all", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let r = read_json(&out);
    let keys: Vec<&String> = r["suites"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["berger#1", "berger#2"]);
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[berger]\na = 0.3\nthis is not a pair\n").unwrap();
    let o = ewgeom(&["report-all", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(text(&o).contains("line 3"), "{}", text(&o));
}

#[test]
fn shipped_acceptance_config_passes() {
    let o = ewgeom(&["report-all", repo_file("acceptance.cfg").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = ewgeom(&[
            "verify", "--family", "sfk", "--h", "poly:2,1", "--f", "poly:1,1", "--samples", "6",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", text(&o));
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn csv_grid_has_header_and_admissible_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = ewgeom(&[
        "sample", "--family", "hypercr-toda", "--h", "poly:1,0+1i", "--grid", "10x10x10", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for col in ["x", "y", "z", "g00", "u", "kappa", "toda", "einstein_weyl"] {
        assert!(header.contains(&col), "{col} missing from {header:?}");
    }
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r.split(',').count() == header.len()));
}

#[test]
fn json_grid_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let csv = dir.path().join("g.csv");
    for out in [&json, &csv] {
        let o = ewgeom(&[
            "sample", "--family", "sfk", "--h", "poly:2,1", "--f", "poly:1,1", "--grid", "3x3x2x2",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", text(&o));
    }
    let v = read_json(&json);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    let csv_rows: Vec<Vec<f64>> = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(csv_rows.len(), rows.len());
    for (jr, cr) in rows.iter().zip(&csv_rows) {
        let jr: Vec<f64> = jr.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(jr.len(), cr.len());
        for (a, b) in jr.iter().zip(cr) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
    // re-serialising the parsed document reproduces it
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn empty_grid_domain_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = ewgeom(&[
        "sample", "--family", "hypercr-toda", "--h", "poly:-5", "--z-min", "0.1", "--z-max", "1",
        "--grid", "4x4x4", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}
