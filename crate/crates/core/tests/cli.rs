use std::process::Command;

use isolab::cli::{
    self, parse_config_str, ConfigError, Experiment, Format, RunConfig, SeedNeeds, Status,
};

const BIN: &str = env!("CARGO_BIN_EXE_isolab");

fn running_text() -> String {
    serde_json::to_string_pretty(&RunConfig::running_example()).unwrap()
}

fn no_seeds() -> SeedNeeds {
    Experiment::PairMake.seed_needs()
}

#[test]
fn running_example_parses() {
    let cfg = parse_config_str(
        &running_text(),
        "running",
        None,
        Experiment::VerifyAll.seed_needs(),
    );
    assert!(cfg.is_ok(), "{:?}", cfg.err());
}

#[test]
fn unknown_field_reports_its_line() {
    let text = "{\n  \"geometry\": {\n    \"ellipse\": {\"a\": 2.0, \"b\": 1.0},\n    \"colour\": 1\n  }\n}";
    let err = parse_config_str(text, "c.json", None, no_seeds()).unwrap_err();
    match &err {
        ConfigError::Parse { line, .. } => assert_eq!(*line, 4),
        other => panic!("{other:?}"),
    }
    assert!(err.to_string().starts_with("c.json:4:"));
}

#[test]
fn invalid_bump_is_located() {
    let text = r#"{
  "geometry": {
    "ellipse": {"a": 2.0, "b": 1.0},
    "focal_bumps": [
      {"center": 0.0, "half_width": 0.3, "depth": 0.1},
      {"center": 1.6, "half_width": 0.3, "depth": 0.1}
    ]
  }
}"#;
    let err = parse_config_str(text, "c.json", None, no_seeds()).unwrap_err();
    let msg = err.to_string();
    assert!(
        matches!(err, ConfigError::Validation { line: Some(6), .. }),
        "{msg}"
    );
}

#[test]
fn seeds_are_required_where_consumed() {
    let text = r#"{"geometry": {"ellipse": {"a": 2.0, "b": 1.0}}}"#;
    let needs = Experiment::BilliardTrace.seed_needs();
    let err = parse_config_str(text, "c.json", None, needs).unwrap_err();
    assert!(err.to_string().contains("seed"), "{err}");
    let cfg = parse_config_str(text, "c.json", Some(9), needs).unwrap();
    assert_eq!(cfg.billiards.seed, Some(9));
}

#[test]
fn experiment_names_round_trip() {
    for e in Experiment::ALL {
        assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
    }
    assert!("nope".parse::<Experiment>().is_err());
}

#[test]
fn exit_codes_follow_status() {
    assert_eq!(Status::Pass.exit_code(), 0);
    assert_eq!(Status::Complete.exit_code(), 0);
    assert_eq!(Status::Warn.exit_code(), 0);
    assert_eq!(Status::Inconclusive.exit_code(), 2);
    assert_eq!(Status::Fail.exit_code(), 1);
}

#[test]
fn pair_make_writes_polylines_and_report() {
    let mut report = cli::run(
        Experiment::PairMake,
        &RunConfig::running_example(),
        Format::Csv,
    )
    .unwrap();
    assert_eq!(report.status, Status::Complete);
    let files = report.render();
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        ["boundary_omega1.csv", "boundary_omega2.csv", "report.json"]
    );
    let rows = String::from_utf8_lossy(&files[0].1).lines().count() - 1;
    assert_eq!(rows, 4096);
}

#[test]
fn json_format_converts_tables() {
    let mut report = cli::run(
        Experiment::PairMake,
        &RunConfig::running_example(),
        Format::Json,
    )
    .unwrap();
    let files = report.render();
    assert_eq!(files[0].0, "boundary_omega1.json");
    let v: serde_json::Value = serde_json::from_slice(&files[0].1).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4096);
}

#[test]
fn empty_sections_are_noted_not_written() {
    let mut cfg = RunConfig::running_example();
    cfg.billiards.l_max = Some(0.5);
    let mut report = cli::run(Experiment::BilliardLengths, &cfg, Format::Csv).unwrap();
    let files = report.render();
    assert!(files.iter().all(|f| !f.0.starts_with("lengths_")));
    assert!(report
        .notes
        .iter()
        .any(|n| n == "lengths_omega1: empty section, no file written"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = RunConfig::running_example();
    let a = cli::run(Experiment::BilliardTrace, &cfg, Format::Csv).unwrap();
    let b = cli::run(Experiment::BilliardTrace, &cfg, Format::Csv).unwrap();
    assert_eq!(a.payload(), b.payload());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, running_text()).unwrap();
    let out = dir.path().join("out");
    let st = Command::new(BIN)
        .args(["pair-make", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("report.json").exists());
    assert!(out.join("boundary_omega1.csv").exists());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"geometry\": 3}").unwrap();
    let o = Command::new(BIN)
        .args(["pair-make", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
}
