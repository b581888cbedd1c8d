use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthospec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn torus(dir: &Path) -> PathBuf {
    write(dir, "torus.json", r#"{"builtin": "one_holed_torus", "coordinates": [0.9, 1.1, 1.3]}"#)
}

fn pants(dir: &Path) -> PathBuf {
    write(dir, "pants.json", r#"{"builtin": "pair_of_pants", "coordinates": [1.0, 1.2, 1.4]}"#)
}

#[test]
fn spectrum_json_and_csv_agree() {
    let dir = TempDir::new().unwrap();
    let t = torus(dir.path());
    let t = t.to_str().unwrap();
    let j = run(&["spectrum", "--surface", t, "--cutoff", "4"]);
    assert_eq!(code(&j), 0, "{}", String::from_utf8_lossy(&j.stderr));
    let v: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["kind"], "full");
    let entries = v["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!((entries[0][0].as_f64().unwrap() - 0.9).abs() < 1e-9);

    let c = run(&["spectrum", "--surface", t, "--cutoff", "4", "--format", "csv"]);
    let text = String::from_utf8(c.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("length,multiplicity"));
    let rows: Vec<(f64, u64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), entries.len());
    for (row, e) in rows.iter().zip(entries) {
        assert_eq!(row.0, e[0].as_f64().unwrap());
        assert_eq!(row.1, e[1].as_u64().unwrap());
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let p = pants(dir.path());
    let p = p.to_str().unwrap();
    let a = run(&["spectrum", "--surface", p, "--cutoff", "5", "--threads", "1"]);
    let b = run(&["spectrum", "--surface", p, "--cutoff", "5", "--threads", "4"]);
    let c = run(&["spectrum", "--surface", p, "--cutoff", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let t = torus(dir.path());
    let out = dir.path().join("spec.json");
    let o = run(&["spectrum", "--surface", t.to_str().unwrap(), "--cutoff", "3", "--simple", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["kind"], "simple");
}

#[test]
fn validation_failures_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad_matching = write(
        dir.path(),
        "bad.json",
        r#"{"genus": 1, "boundary": 1, "hexagons": 2,
            "matching": [[[0,0],[0,0]], [[0,1],[1,1]], [[0,2],[1,2]]],
            "coordinates": [1, 1, 1]}"#,
    );
    let o = run(&["spectrum", "--surface", bad_matching.to_str().unwrap(), "--cutoff", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[0, 0]"));

    let negative = write(dir.path(), "neg.json", r#"{"builtin": "one_holed_torus", "coordinates": [1, -1, 1]}"#);
    assert_eq!(code(&run(&["spectrum", "--surface", negative.to_str().unwrap(), "--cutoff", "3"])), 2);

    let garbage = write(dir.path(), "garbage.json", "not json");
    assert_eq!(code(&run(&["spectrum", "--surface", garbage.to_str().unwrap(), "--cutoff", "3"])), 2);

    let t = torus(dir.path());
    assert_eq!(code(&run(&["spectrum", "--surface", t.to_str().unwrap(), "--cutoff", "-1"])), 2);
    assert_eq!(code(&run(&["spectrum", "--surface", "/nonexistent/x.json", "--cutoff", "3"])), 2);
}

#[test]
fn reconstruct_round_trip_and_pants_rejection() {
    let dir = TempDir::new().unwrap();
    let t = torus(dir.path());
    let o = run(&["reconstruct", "--surface", t.to_str().unwrap(), "--cutoff", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let lengths: Vec<f64> = v["lengths"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (l, want) in lengths.iter().zip([0.9, 1.1, 1.3]) {
        assert!((l - want).abs() < 1e-9);
    }

    let p = pants(dir.path());
    assert_eq!(code(&run(&["reconstruct", "--surface", p.to_str().unwrap()])), 2);
}

#[test]
fn verify_reports_every_check() {
    let dir = TempDir::new().unwrap();
    let p = pants(dir.path());
    let o = run(&["verify", "--surface", p.to_str().unwrap(), "--cutoff", "5"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["development"]["pass"], true);
    let residual = v["basmajian"]["residual"].as_f64().unwrap();
    assert!(residual > 0.0);
    assert_eq!(v["simple_basmajian"]["holds"], true);
    let names: Vec<&str> = v["inequalities"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for n in ["nonsimple_length", "ortho_collar", "orthosystole_boundary", "pants_tau"] {
        assert!(names.contains(&n), "{names:?}");
    }
    let expected = if v["pass"] == true { 0 } else { 1 };
    assert_eq!(code(&o), expected);
}

#[test]
fn develop_svg_marks_every_hexagon_and_arc() {
    let dir = TempDir::new().unwrap();
    let t = torus(dir.path());
    let o = run(&["develop", "--surface", t.to_str().unwrap(), "--orthos", "2"]);
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("class=\"hexagon\"").count(), 2);
    for arc in 0..3 {
        assert!(svg.contains(&format!("data-arc-id=\"arc-{arc}\"")));
    }
    assert!(svg.contains("class=\"seed-axis\""));
    assert!(svg.contains("class=\"orthogeodesic\""));

    let w = run(&["develop", "--surface", t.to_str().unwrap(), "--window", "-2", "2", "3"]);
    assert_eq!(code(&w), 0);
    let bad = run(&["develop", "--surface", t.to_str().unwrap(), "--window", "2", "-2", "3"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn develop_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let p = pants(dir.path());
    let o = run(&["develop", "--surface", p.to_str().unwrap(), "--format", "json", "--orthos", "3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let hexagons = v["hexagons"].as_array().unwrap();
    assert_eq!(hexagons.len(), 2);
    assert_eq!(hexagons[0]["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["seeds"].as_array().unwrap().len(), 3);
    let reserialized = serde_json::to_string(&v).unwrap();
    let again: Value = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(v, again);
}

#[test]
fn probe_is_seeded() {
    let args = ["probe", "--builtin", "one_holed_torus", "--samples", "12", "--range", "0.3", "3", "--eps1", "0.05", "--eps2", "0.5", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["samples"], 12);

    let empty = run(&["probe", "--builtin", "pair_of_pants", "--samples", "0", "--range", "0.3", "3", "--eps1", "0.05", "--eps2", "0.5"]);
    assert_eq!(code(&empty), 0);
    let v: Value = serde_json::from_slice(&empty.stdout).unwrap();
    assert_eq!(v["inconclusive"], true);

    assert_eq!(code(&run(&["probe", "--builtin", "klein_bottle", "--samples", "1", "--range", "0.3", "3", "--eps1", "0.05", "--eps2", "0.5"])), 2);
    assert_eq!(code(&run(&["probe", "--builtin", "pair_of_pants", "--samples", "1", "--range", "3", "0.3", "--eps1", "0.05", "--eps2", "0.5"])), 2);
    assert_eq!(code(&run(&["probe", "--builtin", "pair_of_pants", "--samples", "1", "--eps1", "0.05", "--eps2", "0.5"])), 2);
}
