use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use worldline_lab_cli::output::parse_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_worldline-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("WORLDLINE_LAB_THREADS", "2").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const FIG1: &str = r#"{
  "equation": "EQ26_SPIN",
  "metric": {"dimension": 4, "signature": [1, -1, -1, -1]},
  "initial": {"figure": 1},
  "span": [0, 5],
  "invariants": ["ud2", "speed2"]
}"#;

#[test]
fn simulate_writes_outputs_and_reports_drift() {
    let d = tempfile::tempdir().unwrap();
    let s = scenario(d.path(), "fig1.json", FIG1);
    let out = d.path().to_string_lossy().into_owned();
    let o = run(&["simulate", &s, "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("report.json")).unwrap()).unwrap();
    assert!(report["drift_report"]["ud2"].as_f64().unwrap() <= 1e-7);
    assert!(report["runtime_seconds"].as_f64().unwrap() >= 0.0);
    assert!(d.path().join("trajectory.json").exists());

    let (comments, header, rows) = parse_csv(&std::fs::read_to_string(d.path().join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(comments[0], "equation=EQ26_SPIN");
    assert_eq!(&header[..9], &["s", "x0", "x1", "x2", "x3", "u0", "u1", "u2", "u3"]);
    assert_eq!(rows.len(), report["samples"].as_u64().unwrap() as usize);
    // drifts recomputed from the 17-digit CSV match the report
    for name in ["ud2", "speed2"] {
        let c = header.iter().position(|h| h == name).unwrap();
        let drift = rows.iter().map(|r| (r[c] - rows[0][c]).abs()).fold(0.0, f64::max);
        let reported = report["drift_report"][name].as_f64().unwrap();
        assert!((drift - reported).abs() <= 1e-12, "{name}: {drift} vs {reported}");
    }
}

#[test]
fn empty_span_gives_single_row() {
    let d = tempfile::tempdir().unwrap();
    let s = scenario(d.path(), "e.json", &FIG1.replace("[0, 5]", "[1, 1]"));
    let o = run(&["simulate", &s, "--out", &d.path().to_string_lossy()]);
    assert_eq!(code(&o), 0);
    let (_, _, rows) = parse_csv(&std::fs::read_to_string(d.path().join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 1.0);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_string_lossy().into_owned();

    let bad = scenario(d.path(), "bad.json", r#"{"equation": "EQ26_SPIN", "bogus": 1}"#);
    assert_eq!(code(&run(&["simulate", &bad, "--out", &out])), 2);
    assert_eq!(code(&run(&["simulate", "/nonexistent/s.json", "--out", &out])), 2);
    assert_eq!(code(&run(&["figures", "--n", "7", "--out", &out])), 2);

    // σ·u ≠ 0 violates the supplementary condition
    let spin = scenario(
        d.path(),
        "spin.json",
        r#"{
          "equation": "EQ17_MP",
          "metric": {"dimension": 4, "signature": [1, -1, -1, -1]},
          "params": {"m0": 1.0, "sigma": [0.5, 0, 0, 1]},
          "initial": {"x": [0, 0, 0, 0], "u": [1, 0, 0, 0], "udot": [0, 1, 0, 0]},
          "span": [0, 1]
        }"#,
    );
    let o = run(&["simulate", &spin, "--out", &out]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("worldline-lab: "));

    // hyperbolic EQ68 data blow up before the end of the span
    let blow = scenario(
        d.path(),
        "blow.json",
        r#"{
          "equation": "EQ68_VAR",
          "metric": {"dimension": 4, "signature": [1, -1, -1, -1]},
          "params": {"a": 2.0},
          "initial": {"x": [0, 0, 0, 0], "u": [1, 0, 0, 0], "udot": [0, 1, 0, 0], "uddot": [1, 0, 0, 0]},
          "span": [0, 20]
        }"#,
    );
    assert_eq!(code(&run(&["simulate", &blow, "--out", &out])), 4);
}

#[test]
fn figures_emit_expected_files() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_string_lossy().into_owned();
    assert_eq!(code(&run(&["figures", "--all", "--out", &out])), 0);
    for n in 1..=4 {
        assert!(d.path().join(format!("fig{n}.csv")).exists());
        for p in ["xy", "xt", "yt"] {
            let svg = std::fs::read_to_string(d.path().join(format!("fig{n}_{p}.svg"))).unwrap();
            assert!(svg.contains("stroke-dasharray"));
        }
    }
    let csv = std::fs::read_to_string(d.path().join("fig3.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("omega=1.52 "));

    let d2 = tempfile::tempdir().unwrap();
    let o = run(&["figures", "--n", "2", "--projection", "xy", "--out", &d2.path().to_string_lossy()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_dir(d2.path()).unwrap().count(), 2);
}

#[test]
fn verify_prints_table() {
    let o = run(&["verify", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    let o = run(&["verify", "--suite", "shape", "--trials", "3", "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().skip(1).all(|l| l.ends_with("PASS")));
    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 2);
}

#[test]
fn oracle_passes_and_fails_by_tolerance() {
    let d = tempfile::tempdir().unwrap();
    let s = scenario(d.path(), "o.json", FIG1);
    assert_eq!(code(&run(&["oracle", "--scenario", &s])), 0);

    let tight = scenario(d.path(), "t.json", &FIG1.replace("\"span\"", "\"tolerance\": 1e-13, \"span\""));
    assert_eq!(code(&run(&["oracle", "--scenario", &tight])), 1);

    let line = scenario(
        d.path(),
        "l.json",
        r#"{
          "equation": "EQ26_SPIN",
          "metric": {"dimension": 4, "signature": [1, -1, -1, -1]},
          "initial": {"appendix": {"alpha": 0, "v": [1, 1, 1], "omega": 4}},
          "span": [0, 10],
          "tolerance": 1e-12
        }"#,
    );
    let o = run(&["oracle", "--scenario", &line]);
    assert_eq!(code(&o), 0, "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));

    let wrong = scenario(d.path(), "w.json", &FIG1.replace("EQ26_SPIN", "EQ33_I"));
    assert_eq!(code(&run(&["oracle", "--scenario", &wrong])), 3);
}
