use std::process::{Command, Output};

use relspin::table::Table;

fn relspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relspin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn num(t: &Table, row: usize, col: &str) -> f64 {
    t.column(col).unwrap()[row].as_f64().unwrap()
}

#[test]
fn scan_eta_shape() {
    let o = relspin(&[
        "scan-eta",
        "--xi-max",
        "3",
        "--xi-steps",
        "60",
        "--theta-steps",
        "90",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("xi,theta,eta\n"));
    assert_eq!(text.lines().count(), 1 + 60 * 90);
    assert!(!text.contains('\r'));
}

#[test]
fn offdiag_saturates() {
    let o = relspin(&["offdiag", "--xi", "2.5", "--gamma-t2-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 200);
    let last = t.rows.len() - 1;
    assert_eq!(num(&t, last, "gamma_t2"), 4.0);
    assert!((num(&t, last, "rho_ud") - 0.2589).abs() < 2e-4);
    assert!((num(&t, last, "rho_ud_rest") - 0.5 * (-4.0f64).exp()).abs() < 1e-6);
    assert_eq!(num(&t, 0, "rho_ud"), 0.5);
}

#[test]
fn eta_max_table() {
    let o = relspin(&["eta-max", "--xi-max", "20", "--xi-steps", "41"]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.columns, ["xi", "eta_max", "theta_opt", "chi_m"]);
    assert_eq!(t.rows.len(), 41);
    assert!((num(&t, 5, "eta_max") - 0.51780).abs() < 2e-4);
    assert!(num(&t, 40, "eta_max") > 0.999);
}

#[test]
fn evolve_reports_oracle_agreement() {
    let o = relspin(&[
        "evolve",
        "--xi",
        "1.3",
        "--theta",
        "0.4",
        "--phi",
        "1.1",
        "--bloch",
        "0.3,-0.5,0.6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 201);
    let summary = t.rows.last().unwrap();
    assert_eq!(summary[0].as_f64(), None);
    for v in &summary[1..] {
        assert!(v.as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn montecarlo_evolve_echoes_seed() {
    let args = [
        "evolve",
        "--oracle",
        "montecarlo",
        "--mc-samples",
        "5000",
        "--seed",
        "7",
        "--points",
        "5",
    ];
    let a = relspin(&args);
    let b = relspin(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("# seed = 7"));
}

#[test]
fn concurrence_series() {
    let o = relspin(&[
        "concurrence",
        "--xi",
        "0",
        "--gamma-t2-max",
        "3",
        "--points",
        "13",
    ]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 13);
    for r in 0..13 {
        assert!((num(&t, r, "concurrence") - num(&t, r, "reference_rest")).abs() < 1e-8);
    }
}

#[test]
fn json_output_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta.json");
    let o = relspin(&[
        "eta-max",
        "--xi-steps",
        "3",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["xi", "eta_max", "theta_opt", "chi_m"]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# offdiag run\nxi = 0\ngamma-t2-max = 2\npoints = 3\n",
    )
    .unwrap();
    let o = relspin(&[
        "offdiag",
        "--config",
        cfg.to_str().unwrap(),
        "--points",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 5);
    assert_eq!(num(&t, 4, "gamma_t2"), 2.0);
    assert_eq!(num(&t, 4, "rho_ud"), num(&t, 4, "rho_ud_rest"));
}

#[test]
fn verify_passes() {
    let o = relspin(&["verify", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# seed = 42"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn exit_codes() {
    assert_eq!(relspin(&["--help"]).status.code(), Some(0));
    assert_eq!(relspin(&[]).status.code(), Some(2));
    let bad = relspin(&["scan-eta", "--bogus", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--bogus"));
    let out_of_domain = relspin(&["offdiag", "--theta", "5"]);
    assert_eq!(out_of_domain.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out_of_domain.stderr).contains("--theta"));
    let unwritable = relspin(&["eta-max", "-o", "/nonexistent-dir/x.csv"]);
    assert_eq!(unwritable.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unwritable.stderr).contains("/nonexistent-dir/x.csv"));
}
