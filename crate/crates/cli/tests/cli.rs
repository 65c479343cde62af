use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sidelobe::io::{read_sequence, write_sequence_json};
use sidelobe::{golomb_sequence, isl, Mode};
use sidelobe_cli::report::ExperimentReport;

fn sidelobe(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sidelobe"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .env_remove(sidelobe_cli::SEED_ENV)
        .output()
        .unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map(|d| d.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
        .unwrap_or_default();
    names.sort();
    names
}

#[test]
fn design_writes_four_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidelobe(&["design", "--variant", "accel-misl", "--mode", "aperiodic", "-n", "64", "--seed", "7"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(listing(dir.path()), ["correlation.csv", "sequence.json", "spectrum.csv", "trace.csv"]);

    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ISL=") && stdout.contains("MF="));
    let x = read_sequence(&dir.path().join("sequence.json")).unwrap();
    assert_eq!(x.len(), 64);

    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,isl,objective,alpha,halvings\n"));
    let last: f64 = trace.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - isl(&x, Mode::Aperiodic)).abs() <= 1e-9 * last);

    let corr = fs::read_to_string(dir.path().join("correlation.csv")).unwrap();
    assert_eq!(corr.lines().count(), 1 + 127);
    let spectrum = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 1 + 128);
}

#[test]
fn periodic_design_skips_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidelobe(&["design", "--variant", "pecan", "-n", "16"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(listing(dir.path()), ["correlation.csv", "sequence.json", "trace.csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("mode=periodic"));
}

#[test]
fn invalid_length_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let out = sidelobe(&["design", "--variant", "misl", "-n", "0"], &target);
    assert!(!out.status.success());
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
    assert!(!target.exists());
}

#[test]
fn bad_flags_fail() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["design", "--variant", "bogus", "-n", "8"][..],
        &["design", "--variant", "misl", "-n", "8", "--tol", "0"],
        &["design", "--variant", "pecan", "--mode", "aperiodic", "-n", "8"],
        &["design", "--variant", "spectral-misl", "-n", "8"],
        &["design", "--variant", "misl", "--init", "/nonexistent/x.json"],
    ] {
        let out = sidelobe(args, dir.path());
        assert!(!out.status.success(), "{args:?}");
    }
    assert!(listing(dir.path()).is_empty());
}

#[test]
fn seed_env_overrides_flag() {
    let run = |seed_flag: &str, env: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sidelobe"));
        cmd.args(["design", "--variant", "can", "-n", "32", "--max-iters", "3", "--seed", seed_flag, "--out-dir"])
            .arg(dir.path())
            .env_remove(sidelobe_cli::SEED_ENV);
        if let Some(v) = env {
            cmd.env(sidelobe_cli::SEED_ENV, v);
        }
        assert!(cmd.status().unwrap().success());
        fs::read_to_string(dir.path().join("sequence.json")).unwrap()
    };
    assert_eq!(run("1", Some("5")), run("5", None));
    assert_ne!(run("1", None), run("5", None));
}

#[test]
fn spectral_with_mask_and_file_init() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("mask.json");
    fs::write(
        &mask,
        r#"{"lambda": 10000.0, "bands": [[0.7853981633974483, 1.5707963267948966], [2.356194490192345, 3.141592653589793], [4.71238898038469, 5.497787143782138]]}"#,
    )
    .unwrap();
    let init = dir.path().join("init.json");
    write_sequence_json(&init, &golomb_sequence(100).unwrap()).unwrap();
    let out_dir = dir.path().join("run");
    let out = sidelobe(
        &["design", "--variant", "spectral-misl", "--accelerate", "--mask", mask.to_str().unwrap(), "--init", init.to_str().unwrap()],
        &out_dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("N=100"));

    let rows: Vec<(usize, f64)> = fs::read_to_string(out_dir.join("spectrum.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0].parse().unwrap(), cols[2].parse().unwrap())
        })
        .collect();
    let stop = |k: usize| (25..50).contains(&k) || (75..100).contains(&k) || (150..175).contains(&k);
    let mean = |sel: bool| {
        let v: Vec<f64> = rows.iter().filter(|r| stop(r.0) == sel).map(|r| r.1).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(10.0 * (mean(false) / mean(true)).log10() > 15.0);

    let wrong_n = sidelobe(&["design", "--variant", "misl", "-n", "50", "--init", init.to_str().unwrap()], &out_dir);
    assert!(!wrong_n.status.success());
}

#[test]
fn compare_single_trial_has_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidelobe(&["compare", "--variants", "accel-misl", "--lengths", "32", "--trials", "1", "--jobs", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: ExperimentReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.aggregates.len(), 1);
    assert!(report.merit_identity_error() < 1e-9);
    assert_eq!(listing(dir.path()), ["records.csv", "report.json", "summary.csv"]);
}

#[test]
fn compare_is_deterministic_across_job_counts() {
    let numbers = |jobs: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = sidelobe(
            &["compare", "--variants", "can,misl", "--lengths", "16,24", "--trials", "3", "--jobs", jobs, "--max-iters", "200"],
            dir.path(),
        );
        assert!(out.status.success());
        let report: ExperimentReport =
            serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        let records: Vec<_> = report.records.iter().map(|r| (r.variant, r.n, r.seed, r.final_isl, r.iterations)).collect();
        let means: Vec<_> = report.aggregates.iter().map(|a| (a.variant, a.n, a.mean_mf, a.median_mf)).collect();
        (records, means)
    };
    assert_eq!(numbers("1"), numbers("4"));
}

#[test]
fn compare_cross_init_emits_both_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = sidelobe(
        &["compare", "--variants", "can,accel-misl", "--lengths", "32", "--trials", "2", "--cross-init"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: ExperimentReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.cross_init.len(), 4);
    for c in &report.cross_init {
        let handoff = *c.first_isl.last().unwrap();
        assert!((c.second_isl[0] - handoff).abs() <= 1e-12 * handoff);
    }
    let csv = fs::read_to_string(dir.path().join("cross_init.csv")).unwrap();
    assert!(csv.starts_with("n,trial,first,second,stage,iteration,isl\n"));

    let bad = sidelobe(&["compare", "--variants", "can", "--lengths", "32", "--cross-init"], dir.path());
    assert!(!bad.status.success());
}

#[test]
fn validate_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_sidelobe")).arg("validate").output().unwrap();
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    for n in 1..=8 {
        assert!(table.contains(&format!("lambda_max(Phi) N={n} ")));
    }
    assert!(table.contains("quadratic-form identity"));
    assert!(table.contains(", 0 failed"));
}
