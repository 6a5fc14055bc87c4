//! Drives the `isotune` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn isotune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotune")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Data rows of a run CSV, comment lines skipped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next().unwrap(), "t,loss,delta,Delta,eta,null,cum_regret,bound");
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

fn summary_ratio(line: &str) -> f64 {
    line.split(", ").last().unwrap().trim().parse().unwrap()
}

#[test]
fn hedge_run_writes_one_row_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hedge.csv");
    let o = isotune(&[
        "run", "--algo", "isohedge", "--stream", "iid_uniform", "--N", "10", "--T", "1000", "--seed", "7",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 1000);
    assert_eq!(rows[999][0], "1000");
    let line = stdout(&o);
    let first = line.lines().next().unwrap();
    assert!(first.starts_with("isohedge, 1000, 10, "), "{first}");
    assert!(summary_ratio(first) <= 1.0);
    // The CSV carries the config.
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# ") && text.contains("isohedge") && text.contains("\"seed\": 7"));
}

#[test]
fn plateau_run_reports_distance_to_the_minimizer() {
    let o = isotune(&["run", "--algo", "isogd", "--stream", "plateau_exp", "--T", "1000", "--q", "1"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    let dist: f64 = err.lines().find_map(|l| l.strip_prefix("|x_T - x*| = ")).unwrap().parse().unwrap();
    assert!(dist < 0.5, "{dist}");
    // Without --out the CSV goes to stdout.
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with('#')).count(), 1001);
}

#[test]
fn bad_algo_tag_exits_2_and_lists_tags() {
    let o = isotune(&["run", "--algo", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("isohedge") && err.contains("isogd"), "{err}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"algo": "isoprod", "N": 3, "T": 40, "stream": {"kind": "iid_gaussian", "sigma": 2.0}}"#).unwrap();
    let out = dir.path().join("r.csv");
    let o = isotune(&["run", "--config", cfg.to_str().unwrap(), "--T", "25", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&out).len(), 25);
    assert!(stdout(&o).starts_with("isoprod, 25, 3, "));
    fs::write(&cfg, r#"{"algo": "isoprod", "bogus": 1}"#).unwrap();
    assert_eq!(isotune(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn replay_files_drive_runs() {
    let dir = tempfile::tempdir().unwrap();
    let replay = dir.path().join("l.csv");
    fs::write(&replay, "l1,l2\n1,0\n0,1\n0.5,0.25\n").unwrap();
    let spec = format!("replay:{}", replay.display());
    let o = isotune(&["run", "--algo", "isohedge", "--stream", &spec, "--out", dir.path().join("o.csv").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("isohedge, 3, 2, "));
    let missing = isotune(&["run", "--algo", "isohedge", "--stream", "replay:/no/such/file.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn non_finite_losses_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let replay = dir.path().join("l.csv");
    fs::write(&replay, "l1,l2\n1,0\n1e308,-1e308\n1e308,-1e308\n").unwrap();
    let spec = format!("replay:{}", replay.display());
    let o = isotune(&["run", "--algo", "isogd", "--stream", &spec]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("round"));
}

#[test]
fn sweep_over_q_writes_three_files_and_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = isotune(&[
        "sweep", "--algo", "isohedge", "--N", "4", "--T", "200", "--grid", "q=0.25,1,4", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csvs: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "index.csv")
        .collect();
    assert_eq!(csvs.len(), 3);
    let index = fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 4);
    for n in &csvs {
        assert!(n.starts_with("isohedge_iid_uniform_0_") && index.contains(n.as_str()));
    }
}

#[test]
fn sweep_over_seeds_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = isotune(&[
            "sweep", "--algo", "isomlprod", "--N", "3", "--T", "100", "--grid", "seed=1..10", "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 11);
    let mut bodies = std::collections::BTreeSet::new();
    for n in &names {
        let x = fs::read(a.path().join(n)).unwrap();
        assert_eq!(x, fs::read(b.path().join(n)).unwrap(), "{n:?}");
        bodies.insert(x);
    }
    assert_eq!(bodies.len(), 11);
}

#[test]
fn empty_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = isotune(&["sweep", "--algo", "isohedge", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = isotune(&["sweep", "--algo", "isohedge", "--grid", "q=", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_lemmas_passes() {
    let o = isotune(&["verify", "lemmas"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lemmas: 3 passed, 0 failed"));
}

#[test]
fn verify_invariance_passes() {
    let o = isotune(&["verify", "invariance"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failed"));
}

#[test]
fn verify_oracles_passes() {
    assert!(isotune(&["verify", "oracles"]).status.success());
}

#[test]
fn verify_bounds_default_suite_passes() {
    let o = isotune(&["verify", "bounds"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("bounds: 1440 passed, 0 failed"));
}

#[test]
fn help_lists_every_flag() {
    let help = stdout(&isotune(&["run", "--help"]));
    for flag in ["--algo", "--stream", "--N", "--T", "--q", "--c", "--seed", "--out", "--config", "--m-pivot"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}
