use std::path::Path;
use std::process::{Command, Output};

use cers_core::scenario::{config_from_csv, run_scenario};

fn cers(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cers"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

const SMALL: &str = "n_z = 24\nn_t = 24\nsweep_points = 12\n";

#[test]
fn srs_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = cers(dir.path(), &["srs"], SMALL);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(!csv.contains('\r'));
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "t_tilde,i_spon");
    assert_eq!(rows.len(), 1 + 25);
    let first: Vec<f64> = rows[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0]);
    assert!(csv.contains("#@ delta = 1200000000 # default"));
    assert!(csv.contains("#@ n_z = 24\n"));
}

#[test]
fn out_flag_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fringe.csv");
    let out = cers(
        dir.path(),
        &["sweep-phase", "--grid", "16", "--sweep-points", "10", "--out", path.to_str().unwrap()],
        "scenario = cers\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.contains("#@ scenario = sweep-phase"));
    assert!(csv.contains("#@ n_t = 16"));
    assert_eq!(data_rows(&csv).len(), 1 + 10);
    assert!(csv.contains("# fringe_visibility: "));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let typo = cers(dir.path(), &["cers"], "detla = 1e9\n");
    assert_eq!(typo.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&typo.stderr).contains("line 1"));

    let zero = cers(dir.path(), &["cers"], "delta = 0\n");
    assert_eq!(zero.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("delta"));

    let few = cers(dir.path(), &["sweep-phase", "--sweep-points", "4"], SMALL);
    assert_eq!(few.status.code(), Some(2));

    let missing = Command::new(env!("CARGO_BIN_EXE_cers"))
        .args(["srs", "--config", dir.path().join("absent.cfg").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn solver_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // first pulse not a whole number of steps
    let odd = cers(dir.path(), &["cers"], "n_z = 16\nn_t = 16\npulse_duration = 1.03\n");
    assert_eq!(odd.status.code(), Some(3));
    // direct solver refuses a step this coarse
    let coarse = cers(dir.path(), &["validate"], "n_z = 8\nn_t = 8\n");
    assert_eq!(coarse.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&coarse.stderr).contains("validate"));
}

#[test]
fn validate_passes_on_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = cers(dir.path(), &["validate"], "n_z = 32\nn_t = 32\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("# verdict: PASS"));
}

#[test]
fn emitted_metadata_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "n_z = 20\nn_t = 20\nphase_pump = 0.4\npulse_duration = 1.5\napply_delay_decay = yes\ndelay_time = 1e-6\n";
    for scenario in ["srs", "cers", "sweep-phase", "sweep-seed"] {
        let first = cers(dir.path(), &[scenario, "--sweep-points", "9"], cfg);
        assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
        let csv = String::from_utf8(first.stdout).unwrap();
        let again = run_scenario(&config_from_csv(&csv).unwrap()).unwrap();
        assert_eq!(data_rows(&csv), data_rows(&again.csv), "{scenario}");
        let repeat = cers(dir.path(), &[scenario, "--sweep-points", "9"], cfg);
        assert_eq!(csv.as_bytes(), repeat.stdout.as_slice(), "{scenario}");
    }
}
