//! End-to-end tests of the installed binary: exit codes, artifact shape,
//! and the simulate -> CSV -> ingest round trip.

use ou_yule::io::parse_csv;
use ou_yule::ou_sim::{simulate_euler, OuParams, SampleGrid};
use ou_yule::yule_stats::rho_discrete;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ou-yule"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bin(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["help"]).status.code(), Some(0));
    assert_eq!(bin(&[]).status.code(), Some(2), "no command is a usage error");
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bin(&["simulate", "--theta", "1"]).status.code(),
        Some(2),
        "missing --n"
    );
    assert_eq!(
        bin(&["simulate", "--theta", "1", "--n", "50", "--zebra", "1"]).status.code(),
        Some(2)
    );
    // runtime errors: unreadable input, explosive scheme
    assert_eq!(
        bin(&["rho", "--input", "/nonexistent/pair.csv"]).status.code(),
        Some(1)
    );
    assert_eq!(
        bin(&["simulate", "--theta", "300", "--n", "100", "--delta", "0.01"]).status.code(),
        Some(1)
    );
    assert_eq!(
        bin(&["analytic", "--name", "cst", "--theta", "1"]).status.code(),
        Some(0)
    );
}

#[test]
fn provenance_header_on_stdout() {
    let text = stdout(&["simulate", "--theta", "1", "--n", "16", "--seed", "3"]);
    let first = text.lines().next().unwrap();
    assert!(
        first.starts_with("# seed=3, version=") && first.contains("config=simulate"),
        "header: {first}"
    );
    let table = parse_csv(&text).unwrap();
    assert_eq!(table.columns, vec!["t", "x1", "x2"]);
    assert_eq!(table.rows.len(), 17);
}

#[test]
fn simulate_csv_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.csv");
    let path_str = path.to_str().unwrap();
    stdout(&[
        "simulate", "--theta", "2", "--n", "5000", "--seed", "77", "--output", path_str,
    ]);

    // in-memory value with the identical configuration
    let params = OuParams::new(2.0).unwrap();
    let grid = SampleGrid::from_lambda(5000, 0.6).unwrap();
    let pair = simulate_euler(&params, &grid, 77).unwrap();
    let expected = rho_discrete(&pair).unwrap().rho;

    let text = stdout(&["rho", "--input", path_str]);
    let table = parse_csv(&text).unwrap();
    let rho = table.column("rho").unwrap()[0];
    assert!(
        (rho - expected).abs() <= 1e-12,
        "round trip drifted: {rho} vs {expected}"
    );
}

#[test]
fn assess_reports_consistent_p_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.csv");
    let path_str = path.to_str().unwrap();
    stdout(&[
        "simulate", "--theta", "1", "--n", "4000", "--seed", "5", "--output", path_str,
    ]);
    let text = stdout(&["assess", "--input", path_str, "--theta", "1"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    let result = &doc["result"];
    let psi = result["psi"].as_f64().unwrap();
    let p = result["p_value"].as_f64().unwrap();
    let expected = 2.0 * ou_yule::normal::norm_sf(psi.abs());
    assert!((p - expected).abs() < 1e-15);
    assert!(result["t_star"].as_f64().unwrap() >= std::f64::consts::E);
    assert!(result["rate_discrete"].as_f64().unwrap() > 0.0);
}

#[test]
fn mc_table_process_level_determinism() {
    let args = [
        "mc-table", "--theta", "1", "--n", "400", "--reps", "20", "--seed", "42",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let mut with_workers = args.to_vec();
    with_workers.extend_from_slice(&["--workers", "2"]);
    let c = stdout(&with_workers);
    assert_eq!(a, c);
    let table = parse_csv(&a).unwrap();
    assert_eq!(
        table.columns,
        vec!["theta", "n", "T_n", "mean", "median", "stddev"]
    );
    assert_eq!(table.rows.len(), 1);
}

#[test]
fn kernel_check_emits_expected_fields() {
    let text = stdout(&[
        "kernel-check", "--theta", "1", "--t", "5", "--m", "256", "--eigen-m", "128",
        "--contraction-m", "64", "--rank", "5",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let r = &doc["result"];
    for key in [
        "var_closed_form",
        "var_quadrature",
        "contraction_value",
        "contraction_bound",
    ] {
        assert!(r[key].is_f64(), "missing {key}");
    }
    assert_eq!(r["top_eigenvalues"].as_array().unwrap().len(), 5);
    let cv = r["contraction_value"].as_f64().unwrap();
    let cb = r["contraction_bound"].as_f64().unwrap();
    assert!(cv > 0.0, "contraction must carry mass, got {cv}");
    assert!(cv <= cb, "contraction {cv} above bound {cb}");
}

#[test]
fn ks_emits_plot_ready_formats() {
    let ecdf = stdout(&["ks", "--n", "500", "--reps", "40", "--emit", "ecdf"]);
    let t = parse_csv(&ecdf).unwrap();
    assert_eq!(t.columns, vec!["x", "F"]);
    let fs = t.column("F").unwrap();
    assert!((fs.last().unwrap() - 1.0).abs() < 1e-15);
    assert!(fs.windows(2).all(|w| w[0] <= w[1]));

    let hist = stdout(&[
        "ks", "--n", "500", "--reps", "40", "--emit", "histogram", "--bins", "8",
    ]);
    let t = parse_csv(&hist).unwrap();
    assert_eq!(t.columns, vec!["bin_left", "bin_right", "count"]);
    let counts = t.column("count").unwrap();
    assert_eq!(counts.iter().sum::<f64>() as usize, 40);
}
