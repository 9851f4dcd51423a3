use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sma_core::config::PhaseThresholds;
use sma_core::runner::{cell_strains_from_csv, phase_pattern, Phase};

fn sma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["run", "--out", out];
    args.extend_from_slice(extra);
    sma(&args)
}

#[test]
fn successful_run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(
        dir.path(),
        &["--preset", "conservation", "--override", "time.t_end=0.1"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["snapshots.csv", "diagnostics.csv", "config_resolved.txt", "summary.txt"] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.starts_with("status: completed"));
}

#[test]
fn resolved_config_reruns_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_into(a.path(), &["--preset", "conservation", "--override", "time.t_end=0.05"]);
    let resolved = a.path().join("config_resolved.txt");
    let out = run_into(b.path(), &["--config", resolved.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(a.path().join("snapshots.csv")).unwrap(),
        fs::read(b.path().join("snapshots.csv")).unwrap()
    );
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--preset", "experiment2", "--override", "time.t_end=0.5"];
    run_into(a.path(), &args);
    run_into(b.path(), &args);
    for name in ["snapshots.csv", "diagnostics.csv", "summary.txt"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn summary_labels_match_csv_strains() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), &["--preset", "experiment1", "--override", "time.t_end=0.3"]);
    let records = cell_strains_from_csv(fs::File::open(dir.path().join("snapshots.csv")).unwrap()).unwrap();
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    let rows: Vec<&str> = summary.lines().skip_while(|l| !l.starts_with("t, ")).skip(1).collect();
    assert_eq!(rows.len(), records.len());
    let th = PhaseThresholds::default();
    for (row, rec) in rows.iter().zip(&records) {
        let labels: Vec<Phase> = rec.strain.iter().map(|e| Phase::classify(*e, &th)).collect();
        let symbols: String = labels.iter().map(|l| l.symbol()).collect();
        let fields: Vec<&str> = row.split(", ").collect();
        assert_eq!(fields[3], phase_pattern(&labels));
        assert_eq!(fields[4], symbols);
    }
    // The initial strain is four martensite bands.
    assert_eq!(rows[0].split(", ").nth(3), Some("M- M+ M- M+"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--preset", "no_such_preset"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run_into(dir.path(), &["--preset", "conservation", "--override", "grid.nx=0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.nx"));

    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "model = \"full_1d\"\npreset = \"conservation\"\n[grid]\nbogus = 1\n",
    )
    .unwrap();
    let out = run_into(dir.path(), &["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let path = dir.path().join("incomplete.toml");
    fs::write(&path, "model = \"full_1d\"\n[grid]\nnx = 10\n").unwrap();
    let out = run_into(dir.path(), &["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unstable_rk4_step_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--preset", "conservation", "--override", "time.dt=0.01"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time.dt"));
}

#[test]
fn integration_abort_exits_with_two_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(
        dir.path(),
        &[
            "--preset",
            "conservation",
            "--override",
            "forcing.heat={kind=\"const\",value=-1e6}",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.starts_with("status: ABORTED"));
    assert!(summary.contains("non-positive temperature"));
    assert!(fs::metadata(dir.path().join("snapshots.csv")).unwrap().len() > 0);
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(
        dir.path(),
        &[
            "--preset",
            "conservation",
            "--override",
            "time.t_end=0.05",
            "--sweep",
            "toggles.mu=0,0.01",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    for sub in ["toggles.mu=0", "toggles.mu=0.01"] {
        assert!(dir.path().join(sub).join("summary.txt").is_file(), "{sub}");
    }
    let resolved = fs::read_to_string(dir.path().join("toggles.mu=0.01/config_resolved.txt")).unwrap();
    assert!(resolved.contains("mu = 0.01"));
}

#[test]
fn slab_preset_writes_slices() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--preset", "slab", "--override", "time.t_end=0.001"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let slices = fs::read_to_string(dir.path().join("slices.csv")).unwrap();
    assert!(slices.starts_with("t,x,Y,u1,u2,theta"));
}

#[test]
fn preset_command_prints_loadable_toml() {
    let out = sma(&["preset"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment1"));
    let out = sma(&["preset", "experiment2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    sma_core::config::parse_config(&text, &[]).expect("printed preset parses");
}
