use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relay-outage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("alpha.csv");
    let o = bin(&[
        "sweep",
        "--scheme",
        "psr",
        "--out",
        csv.to_str().unwrap(),
        "--emit-plot",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,alpha,out_u1r,out_u2r,out_bc,out_system,se,ee,harvest_power_mean"
    );
    assert_eq!(lines.count(), 49);
    let plot = fs::read_to_string(dir.path().join("alpha.gp")).unwrap();
    assert!(plot.contains("alpha.csv"));
}

#[test]
fn emit_plot_without_out_is_a_config_error() {
    let o = bin(&["sweep", "--emit-plot"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimum_reads_back_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rho.csv");
    let path = csv.to_str().unwrap();
    let o = bin(&[
        "sweep",
        "--scheme",
        "tsr",
        "--variable",
        "rho",
        "--start",
        "0.02",
        "--stop",
        "0.48",
        "--steps",
        "47",
        "--out",
        path,
    ]);
    assert!(o.status.success());
    let o = bin(&["optimum", path, "--only", "tsr"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("rho=0.32"), "{}", stdout(&o));
}

#[test]
fn optimum_rejects_unknown_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    fs::write(&csv, "scheme,alpha,out_system\npsr,0.1,0.5\n").unwrap();
    let o = bin(&["optimum", csv.to_str().unwrap(), "--column", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_values_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "system.inr_db = -inf\nsweep.scheme = \"tsr\"\nsweep.mode = \"both\"\nsweep.trials = 1000\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let o = bin(&["point", "--config", path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("scheme,out_u1r"));
    assert!(text.contains("mc_mean"));
    assert_eq!(text.lines().count(), 2);

    let o = bin(&[
        "point", "--config", path, "--scheme", "both", "--mode", "analytic",
    ]);
    let text = stdout(&o);
    assert!(!text.contains("mc_mean"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn bad_config_reports_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "system.eta = 0.5\nsystem.typo = 1\n").unwrap();
    let o = bin(&["point", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    fs::write(&cfg, "psr.alpha1 = 1.5\n").unwrap();
    let o = bin(&["point", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_sweep_rejected() {
    let o = bin(&[
        "sweep",
        "--variable",
        "rho",
        "--start",
        "0.1",
        "--stop",
        "0.6",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["sweep", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mc_sweep_is_reproducible_across_worker_counts() {
    let args = |w: &'static str| {
        vec![
            "sweep",
            "--mode",
            "mc",
            "--trials",
            "5000",
            "--seed",
            "11",
            "--steps",
            "5",
            "--workers",
            w,
        ]
    };
    let a = bin(&args("1"));
    let b = bin(&args("4"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn discrepancy_report_is_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("disc.csv");
    let o = bin(&[
        "discrepancy",
        "--trials",
        "2000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    // 2 schemes × 27 points × 2 users + 3 reference links
    assert_eq!(text.lines().count(), 1 + 108 + 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rows: 111"));
}
