//! End-to-end runs of the `ipsac` binary: outputs and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn ipsac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipsac")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.cfg");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# short mission\nT = 50\n");
    let out = dir.path().display().to_string();
    let o = ipsac(&["solve", "--config", &cfg, "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("scheme: PROPOSED"));
    assert!(text.contains("avg_rate_bpshz: "));
    let csv = std::fs::read_to_string(dir.path().join("trajectory_proposed.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_start,t_end,x_start,x_end,mode,policy"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0.000000");
    assert!(first[1].split('.').nth(1).is_some_and(|d| d.len() == 6));
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!((last[1], last[3]), ("50.000000", "400.000000"));
    assert_eq!(csv.lines().filter(|l| l.contains(",SENSE,")).count(), 10);
}

#[test]
fn solve_every_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "T = 20\n");
    let out = dir.path().display().to_string();
    for (name, file, flag) in [
        ("upper-bound", "trajectory_upper_bound.csv", false),
        ("proposed", "trajectory_proposed.csv", false),
        ("precoder-only", "trajectory_precoder_only.csv", false),
        ("TIME_DIVISION", "trajectory_time_division.csv", false),
    ] {
        let o = ipsac(&["solve", "--config", &cfg, "--scheme", name, "--out", &out]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join(file).exists(), "{file}");
        assert_eq!(stdout(&o).contains("flag: ENDPOINT_IGNORED"), flag);
    }
}

#[test]
fn infeasible_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "gamma_thr = 5e-4\n");
    let o = ipsac(&["solve", "--config", &cfg, "--out", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(dir.path(), "x_I = 0\nx_F = 0\n");
    let o = ipsac(&["solve", "--config", &cfg, "--out", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let o =
        ipsac(&["solve", "--config", &cfg, "--scheme", "precoder-only", "--out", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "T_f = five\n");
    assert_eq!(ipsac(&["solve", "--config", &bad]).status.code(), Some(1));
    let unknown = write_config(dir.path(), "speed = 3\n");
    assert_eq!(ipsac(&["solve", "--config", &unknown]).status.code(), Some(1));
    assert_eq!(ipsac(&["solve"]).status.code(), Some(1));
    assert_eq!(ipsac(&["solve", "--config", "/nonexistent.cfg"]).status.code(), Some(1));
    assert_eq!(ipsac(&["sweep", "--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(ipsac(&["frobnicate"]).status.code(), Some(1));
    let good = write_config(dir.path(), "T = 20\n");
    assert_eq!(ipsac(&["solve", "--config", &good, "--scheme", "greedy"]).status.code(), Some(1));
    assert_eq!(ipsac(&["--help"]).status.code(), Some(0));
    assert_eq!(ipsac(&["--version"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = ipsac(&["sweep", "--preset", "fig4", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    assert!(csv.starts_with("scheme,param,value,avg_rate_bpshz,gap_to_ub,flags\n"));
    assert_eq!(csv.lines().count(), 1 + 8 * 4);
    let svg = std::fs::read_to_string(dir.path().join("fig4.svg")).unwrap();
    assert!(svg.contains("Achievable rate (bits/s/Hz)") && svg.contains("V_max"));
}

#[test]
fn sweep_uses_config_as_base() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "T = 100\n");
    let out = dir.path().display().to_string();
    let o = ipsac(&["sweep", "--preset", "fig3c", "--config", &cfg, "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for label in ["fig3c_gamma_thr_6e-05", "fig3c_gamma_thr_0.0001"] {
        assert!(dir.path().join(format!("{label}.csv")).exists());
        assert!(dir.path().join(format!("{label}.svg")).exists());
    }
}

#[test]
fn verify_reports_error() {
    let o = ipsac(&["verify", "--samples", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let err: f64 =
        text.lines().find_map(|l| l.strip_prefix("max_relative_error: ")).expect("error line").parse().unwrap();
    assert!(err <= 1e-4, "{err}");
    assert_eq!(ipsac(&["verify", "--samples", "0"]).status.code(), Some(1));
}
