use std::process::{Command, Output};

use gammasg::density::{density_c2, density_ln, DensityOptions, SemigroupParams};
use serde_json::Value;

fn gammasg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammasg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows of a CSV with `#` metadata lines.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn moments_last_row_is_120() {
    let o = gammasg(&["moments", "--a", "1", "--b", "1", "--c", "1", "--n-max", "5"]);
    assert!(o.status.success());
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["n", "value", "ln_value"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5][0], "5");
    assert_eq!(rows[5][1].parse::<f64>().unwrap(), 120.0);
}

#[test]
fn classify_reports_indeterminacy() {
    let o = gammasg(&["classify", "--a", "3", "--c", "1", "--b", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"]["determinate"], Value::Bool(false));
    assert_eq!(v["rows"]["krein"]["bounded"], Value::Bool(true));
    let o = gammasg(&["classify", "--a", "1", "--c", "2", "--b", "0.5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"]["determinate"], Value::Bool(true));
    assert_eq!(v["rows"]["boundary"], Value::Bool(true));
    assert_eq!(v["meta"]["a"], 1.0);
}

#[test]
fn density_table_matches_k0_formula() {
    let o = gammasg(&[
        "density",
        "--a",
        "1",
        "--b",
        "1",
        "--c",
        "2",
        "--t-min",
        "0.1",
        "--t-max",
        "10",
        "--count",
        "50",
        "--spacing",
        "log",
    ]);
    assert!(o.status.success());
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["t", "value", "ln_value", "est_abs_err", "method"]);
    assert_eq!(rows.len(), 50);
    let prm = SemigroupParams::new(1.0, 1.0, 2.0).unwrap();
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        let v: f64 = row[1].parse().unwrap();
        let err: f64 = row[3].parse().unwrap();
        assert!((v - density_c2(&prm, t).unwrap().value).abs() <= err);
    }
}

#[test]
fn csv_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let o = gammasg(&[
        "density",
        "--a",
        "0.7",
        "--b",
        "2.5",
        "--c",
        "1.3",
        "--t-min",
        "1e-6",
        "--t-max",
        "1e4",
        "--count",
        "40",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = gammasg(&[
        "density", "--a", "0.7", "--b", "2.5", "--c", "1.3", "--t-min", "1e-6", "--t-max", "1e4", "--count", "40",
        "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&json)).unwrap();
    let (_, rows) = parse_csv(&std::fs::read_to_string(&path).unwrap());
    let prm = SemigroupParams::new(0.7, 2.5, 1.3).unwrap();
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        let d = density_ln(&prm, t.ln(), &DensityOptions::default()).unwrap();
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), d.value.to_bits());
        assert_eq!(row[2].parse::<f64>().unwrap().to_bits(), d.ln_value.to_bits());
    }
    for (row, obj) in rows.iter().zip(v["rows"].as_array().unwrap()) {
        for (k, cell) in ["t", "value", "ln_value", "est_abs_err"].iter().zip(row) {
            let from_csv: f64 = cell.parse().unwrap();
            let from_json = obj[*k].as_f64().unwrap();
            assert_eq!(from_csv.to_bits(), from_json.to_bits(), "{k}: {cell}");
        }
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = [
        "asympt", "--a", "1", "--b", "0.5", "--c", "1.5", "--t-min", "1e-4", "--t-max", "1e4", "--count", "30",
    ];
    let many = gammasg(&args);
    let one = Command::new(env!("CARGO_BIN_EXE_gammasg"))
        .args(args)
        .env("GAMMASG_THREADS", "1")
        .output()
        .unwrap();
    assert!(many.status.success() && one.status.success());
    assert_eq!(many.stdout, one.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_gammasg"))
        .args(args)
        .env("GAMMASG_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sample_is_seeded_and_carries_metadata() {
    let args = [
        "sample", "--a", "1", "--b", "1", "--c", "2", "--n", "100", "--seed", "9",
    ];
    let a = gammasg(&args);
    let b = gammasg(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("# seed: 9") && text.contains("# generator: ChaCha20Rng"));
    let (_, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 100);
    let g = gammasg(&[
        "sample", "--a", "1", "--b", "1", "--c", "2", "--n", "100", "--seed", "9", "--gumbel",
    ]);
    let (_, grows) = parse_csv(&stdout(&g));
    for (t, x) in rows.iter().zip(&grows) {
        let t: f64 = t[1].parse().unwrap();
        let x: f64 = x[1].parse().unwrap();
        assert!((-t.ln() - x).abs() <= 1e-14 * x.abs().max(1.0));
    }
}

#[test]
fn gumbel_tables() {
    let o = gammasg(&[
        "gumbel",
        "--a",
        "1",
        "--b",
        "1",
        "--c",
        "1",
        "--table",
        "cumulants",
        "--n-max",
        "2",
    ]);
    let (_, rows) = parse_csv(&stdout(&o));
    assert!((rows[0][1].parse::<f64>().unwrap() - 0.577_215_664_901_532_9).abs() < 1e-15);
    let o = gammasg(&[
        "gumbel", "--a", "1", "--b", "1", "--c", "1", "--x-min", "-2", "--x-max", "2", "--count", "5",
    ]);
    let (_, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows[2][0], "0");
    assert!((rows[2][1].parse::<f64>().unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    let o = gammasg(&[
        "gumbel",
        "--a",
        "1",
        "--b",
        "1",
        "--c",
        "1",
        "--table",
        "coefficients",
        "--n-max",
        "31",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gammasg(&["density", "--a", "1"]).status.code(), Some(2));
    assert_eq!(
        gammasg(&["density", "--a", "-1", "--b", "1", "--c", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gammasg(&["density", "--a", "1", "--b", "1", "--c", "1", "--count", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(gammasg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gammasg(&["verify", "--check", "10"]).status.code(), Some(2));
}

#[test]
fn single_verify_check_passes() {
    let o = gammasg(&["verify", "--check", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] 1 "));
}

/// The full suite is the acceptance gate. Checks 5 and 9 fail on the
/// shipped configuration (see `gammasg::verify::KNOWN_FAILURES`), so the
/// subcommand exits 1; this asserts that nothing else fails.
#[test]
fn verify_runs_all_checks() {
    let o = gammasg(&["verify", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = v["rows"].as_array().unwrap();
    assert_eq!(reports.len(), 9);
    let failed: Vec<u64> = reports
        .iter()
        .filter(|r| r["passed"] == Value::Bool(false))
        .map(|r| r["id"].as_u64().unwrap())
        .collect();
    let known: Vec<u64> = gammasg::verify::KNOWN_FAILURES
        .iter()
        .map(|(id, _)| *id as u64)
        .collect();
    assert!(
        failed.iter().all(|id| known.contains(id)),
        "unexpected failures {failed:?}"
    );
    assert_eq!(o.status.code(), Some(if failed.is_empty() { 0 } else { 1 }));
}
