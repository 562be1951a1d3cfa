use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn entlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn column(rows: &[&str], idx: usize) -> Vec<f64> {
    rows[1..]
        .iter()
        .map(|r| r.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn figure_one_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = entlab(&["figure", "--id", "1", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "gamma_t,c_phi,c_psi");
    assert_eq!(rows.len(), 2001);
    assert!(text.starts_with("# entlab"));
    assert!(text.contains("# lambda_over_gamma=1.0000000000000000e-2\n"));
    let psi = column(&rows, 2);
    // Dark stretch followed by a revival.
    let first_zero = psi.iter().position(|&c| c == 0.0).unwrap();
    assert!(psi[first_zero..].iter().any(|&c| c > 0.1));
}

#[test]
fn sweep_figure_schema() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = entlab(&["figure", "--id", "6", "--out-dir", d, "--steps", "20", "--points", "5"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("fig6.csv")).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "param_name,param_value,gamma_t,c_phi,c_psi");
    assert_eq!(rows.len(), 1 + 5 * 20);
    assert!(rows[1].starts_with("kt_over_hbar_omega0,0.0000000000000000e0,"));
}

#[test]
fn esd_high_temperature_onset() {
    let out = entlab(&["esd", "--env", "markovian", "--x", "0.1", "--family", "psi", "--r", "1", "--alpha-sq", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "family,kind,t_start,t_end");
    let onset: f64 = rows
        .iter()
        .find(|r| r.starts_with("psi,onset,"))
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let target = 0.88 * 0.1 / 2.0;
    assert!((onset - target).abs() / target < 0.01, "{onset}");
}

#[test]
fn two_step_trajectory() {
    let out = entlab(&["trajectory", "--env", "strong-t0", "--lambda-over-gamma", "0.1", "--steps", "2", "--tmax", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(column(&rows, 0), vec![0.0, 5.0]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = entlab(&[
            "sweep", "--env", "markovian", "--x", "2", "--axis", "r", "--min", "0.3", "--max", "1",
            "--points", "8", "--steps", "300", "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_entlab"))
            .args(["figure", "--id", "2", "--out-dir"])
            .arg(dir.path())
            .args(["--steps", "200", "--points", "11"])
            .env("ENTLAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        fs::read(dir.path().join("fig2.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "env=markovian\nx=inf\nr=0.5\nsteps=3\ntmax=2\n").unwrap();
    let out = entlab(&["trajectory", "--config", cfg.to_str().unwrap(), "--r", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# x=inf\n"));
    assert!(text.contains("# r=1.0000000000000000e0\n"));
    let rows = data_lines(&text);
    let phi = column(&rows, 1);
    // Bell Φ at zero temperature: C = e^{−Γt}.
    assert!((phi[2] - (-2f64).exp()).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    assert_eq!(entlab(&["trajectory", "--r", "1.5"]).status.code(), Some(1));
    assert_eq!(entlab(&["trajectory", "--steps", "1"]).status.code(), Some(1));
    assert_eq!(entlab(&["trajectory", "--x", "1"]).status.code(), Some(2));
    assert_eq!(entlab(&["sweep", "--min", "0", "--max", "1"]).status.code(), Some(2));
    assert_eq!(entlab(&["esd", "--axis", "r"]).status.code(), Some(2));
    assert_eq!(entlab(&["figure", "--id", "9"]).status.code(), Some(2));
    assert_eq!(entlab(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        entlab(&["trajectory", "--config", "/nonexistent/entlab.cfg"]).status.code(),
        Some(1)
    );
}

#[test]
fn validate_passes() {
    let out = entlab(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
}

#[test]
fn writes_into_requested_directory_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = entlab(&["figure", "--id", "4", "--out-dir", dir.path().to_str().unwrap(), "--steps", "10", "--points", "3"]);
    assert!(out.status.success());
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("fig4.csv")]);
    assert!(Path::new(&dir.path().join("fig4.csv")).exists());
}
