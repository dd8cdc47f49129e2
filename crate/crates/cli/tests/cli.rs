use std::path::Path;
use std::process::{Command, Output};

use macbound::counterexample::{self, counterexample_row};
use macbound::figure1::{self, figure1_rows};
use macbound::{run, ExperimentConfig, ExperimentKind};

fn macbound(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macbound"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn figure1_csv_schema_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let res = macbound(
        &[
            "figure1", "--trials", "500", "--n-max", "30", "--seed", "42",
        ],
        &out,
    );
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed: 42\n"));
    assert!(text.contains("# sigma_sq: 0.25\n"));
    assert!(text.contains("# tool: macbound "));
    let lines = data_lines(&text);
    assert!(lines[0].starts_with(
        "num_training_samples,mc,cat1,kl1,diff1,klnhalf,catnhalf,diffnhalf,klsqrt,catsqrt,diffsqrt,"
    ));
    assert_eq!(lines.len(), 4);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "10");
    let cat1: f64 = first[2].parse().unwrap();
    assert_eq!(cat1, 0.5 * (1.0f64 / 18.0).sqrt());
    assert!(text.ends_with('\n'));
}

#[test]
fn json_mirrors_csv_fields() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_out, json_out) = (dir.path().join("f.csv"), dir.path().join("f.json"));
    let args = ["figure1", "--trials", "300", "--n-values", "12,20"];
    assert!(macbound(&args, &csv_out).status.success());
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert!(macbound(&json_args, &json_out).status.success());

    let csv_text = std::fs::read_to_string(&csv_out).unwrap();
    let lines = data_lines(&csv_text);
    let header: Vec<&str> = lines[0].split(',').collect();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (row, line) in rows.iter().zip(&lines[1..]) {
        let keys: Vec<&str> = row
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(keys, header);
        for (key, field) in header.iter().zip(line.split(',')) {
            let from_csv: f64 = field.parse().unwrap();
            assert_eq!(row[key].as_f64().unwrap(), from_csv, "{key}");
        }
    }
    assert_eq!(json["metadata"]["n_values"], "12 20");
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = [
        "counterexample",
        "--trials",
        "5000",
        "--n-max",
        "64",
        "--seed",
        "3",
    ];
    assert!(macbound(&args, &a).status.success());
    assert!(macbound(&args, &b).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    let other_seed = [
        "counterexample",
        "--trials",
        "5000",
        "--n-max",
        "64",
        "--seed",
        "4",
    ];
    assert!(macbound(&other_seed, &c).status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn bad_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // fewer than three points cannot be fitted
    assert!(!macbound(&["rates", "--n-values", "64,128"], &out)
        .status
        .success());
    assert!(!macbound(&["figure1", "--mu", "1.5"], &out).status.success());
    assert!(!macbound(&["figure1", "--trials", "0"], &out)
        .status
        .success());
    assert!(!macbound(&["figure1", "--n-max", "5"], &out)
        .status
        .success());
    assert!(!macbound(&["nonsense"], &out).status.success());
    let unwritable = dir.path().join("missing-dir").join("x.csv");
    let res = macbound(&["verify-mgf"], &unwritable);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("cannot write"));
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let res = Command::new(env!("CARGO_BIN_EXE_macbound"))
        .args(["verify-mgf", "--out"])
        .arg(dir.path().join("v.csv"))
        .env("MACBOUND_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!res.status.success());
}

#[test]
fn verify_mgf_echoes_grid_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    assert!(macbound(&["verify-mgf", "--n-max", "12"], &out)
        .status
        .success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# catoni_grid: m=1..12 x beta=5 values x p=21 points"));
    assert!(text.contains("# kl_grid: m=1..12 x p=101 points"));
    assert_eq!(data_lines(&text).len(), 1 + 12 * (5 * 21 + 101));
}

#[test]
fn tampered_rows_fail_checks() {
    let mut config = ExperimentConfig::new(ExperimentKind::Figure1, "unused");
    config.trials = 200;
    config.n_values = Some(vec![10, 40]);
    let mut rows = figure1_rows(&config).unwrap();
    assert!(figure1::check_rows(&rows).is_empty());
    rows[1].mc = rows[1].cat1 + 10.0 * rows[1].mc_std_error;
    rows[0].diffsqrt = rows[0].catsqrt;
    let failed = figure1::check_rows(&rows);
    assert_eq!(failed.len(), 2, "{failed:?}");
    assert!(failed[0].starts_with("n=10"));
    assert!(failed[1].starts_with("n=40"));

    let mut row = counterexample_row(16, 1, 2000, 1).unwrap();
    assert!(counterexample::check_rows(std::slice::from_ref(&row)).is_empty());
    row.gap_violations = 1;
    row.frequency_ci_upper = row.phi / 2.0;
    assert_eq!(counterexample::check_rows(&[row]).len(), 2);
}

#[test]
fn rates_table_matches_predictions() {
    let config = ExperimentConfig::new(ExperimentKind::Rates, "unused");
    let outcome = run(&config).unwrap();
    assert!(outcome.passed(), "{:?}", outcome.failed_checks);
    assert_eq!(outcome.table.rows.len(), 3);
}

#[test]
fn counterexample_rows_pass_checks() {
    let mut config = ExperimentConfig::new(ExperimentKind::Counterexample, "unused");
    config.trials = 20_000;
    let outcome = run(&config).unwrap();
    assert!(outcome.passed(), "{:?}", outcome.failed_checks);
    assert_eq!(outcome.table.rows.len(), 5);
}
