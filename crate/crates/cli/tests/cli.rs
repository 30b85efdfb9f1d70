use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sawsle_core::Accumulator;

fn sawsle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sawsle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn small_run(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--n",
        "150",
        "--samples",
        "30000",
        "--interval",
        "5",
        "--blocks",
        "20",
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    sawsle(&args)
}

#[test]
fn exact_emits_every_grid_point() {
    let o = sawsle(&["exact"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("stat,w,d0,di,cdf"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 501 + 3 * 401);
    let s_at_one = rows.iter().find(|r| r[0] == "S").unwrap();
    let cdf: f64 = s_at_one[4].parse().unwrap();
    assert!((cdf - 2f64.powf(-25.0 / 48.0)).abs() < 1e-15);
}

#[test]
fn enumerate_lists_walks_and_count() {
    let o = sawsle(&["enumerate", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("count=7\n"));
    assert_eq!(text.matches("sawsle-walk v1 N=3").count(), 7);
    let o = sawsle(&["enumerate", "13"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes_and_catches_an_injected_branch_error() {
    let good = sawsle(&["selftest"]);
    assert!(good.status.success(), "{}", stdout(&good));
    assert!(!stdout(&good).contains("FAIL"));
    let bad = sawsle(&["selftest", "--inject-fault", "s-branch"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL s_at_one"));
}

#[test]
fn run_then_analyze_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &["--chains", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("rng=chacha8"));
    assert!(manifest.contains("chain_streams=0,1"));

    let o = sawsle(&["analyze", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in [
        "cdf_X.csv",
        "cdf_Y.csv",
        "cdf_R.csv",
        "cdf_S.csv",
        "angular.csv",
    ] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let header = text.lines().next().unwrap();
        let width = header.split(',').count();
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == width));
    }
    let angular = fs::read_to_string(dir.path().join("angular.csv")).unwrap();
    assert_eq!(angular.lines().count(), 1801);
    let fit = fs::read_to_string(dir.path().join("fit_exponents.csv")).unwrap();
    assert!(fit.lines().nth(1).unwrap().starts_with("b,"));
    let plot = fs::read_to_string(dir.path().join("least_sq.plt")).unwrap();
    assert!(plot
        .lines()
        .skip(1)
        .all(|l| l.split_whitespace().count() == 2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "n=80\nsamples=2000\ninterval=3\nseed=5\n").unwrap();
    let out = dir.path().join("out");
    let o = sawsle(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("n=80\n") && manifest.contains("seed=6\n"));
}

#[test]
fn halted_run_resumes_to_the_same_result() {
    let root = tempfile::tempdir().unwrap();
    let (a, b) = (root.path().join("a"), root.path().join("b"));
    assert!(small_run(&a, &[]).status.success());

    let halted = small_run(
        &b,
        &["--checkpoint-every", "20000", "--halt-after", "60000"],
    );
    assert!(halted.status.success());
    assert!(stdout(&halted).contains("halted"));
    assert!(!b.join("accumulator.txt").exists());

    let refused = small_run(&b, &["--checkpoint-every", "20000"]);
    assert_eq!(refused.status.code(), Some(2));
    let mismatched = small_run(
        &b,
        &["--checkpoint-every", "20000", "--resume", "--seed", "9"],
    );
    assert_eq!(mismatched.status.code(), Some(2));

    let resumed = small_run(&b, &["--checkpoint-every", "20000", "--resume"]);
    assert!(
        resumed.status.success(),
        "{}",
        String::from_utf8_lossy(&resumed.stderr)
    );
    let uninterrupted = small_run(&root.path().join("c"), &["--checkpoint-every", "20000"]);
    assert!(uninterrupted.status.success());
    assert_eq!(
        fs::read(b.join("accumulator.txt")).unwrap(),
        fs::read(root.path().join("c/accumulator.txt")).unwrap()
    );
}

#[test]
fn empty_accumulator_is_rejected_without_writing_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut buf = Vec::new();
    Accumulator::new(10, 0).write_text(&mut buf).unwrap();
    let path = dir.path().join("accumulator.txt");
    fs::write(&path, buf).unwrap();
    let o = sawsle(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn corrupt_accumulator_reports_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("acc.txt");
    fs::write(&path, "sawsle-accumulator v9\n").unwrap();
    let o = sawsle(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}
