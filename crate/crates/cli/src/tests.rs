//! End-to-end runs of the subcommands, in process, with reports written to
//! scratch files.

use super::*;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

fn scratch(name: &str) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("gridcert-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(format!("{}-{name}", NEXT.fetch_add(1, Ordering::Relaxed)))
}

/// Exit code as `main` would return it, and the report if one was written.
fn run(args: &[&str]) -> (i32, Option<Value>) {
    let report = scratch("report.json");
    let mut argv = vec!["gridcert", "--report", report.to_str().unwrap()];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).unwrap();
    let code = commands::run(&cli.global, &cli.cmd).unwrap_or(2);
    let value = std::fs::read_to_string(&report).ok().map(|t| serde_json::from_str(&t).unwrap());
    (code, value)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn three_gen_clearing_time_exit_codes() {
    let base = ["--net", "3gen", "certify", "resiliency", "--all-lines", "--mu", "0.3", "--tau"];
    assert_eq!(run(&[&base[..], &["0.2"]].concat()).0, 1);
    let (code, r) = run(&[&base[..], &["0.1"]].concat());
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r["schema"], 1);
    assert_eq!(r["exit_code"], 0);
}

#[test]
fn two_bus_fault_csv() {
    let out = scratch("traj.csv");
    let (code, summary) = run(&[
        "simulate", "--net", "2bus", "--fault", "1-2", "--tau", "0.5", "--horizon", "50", "--out", path(&out),
    ]);
    assert_eq!(code, 0);
    assert!(summary.is_some());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,"), "{header}");
    let cols = header.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50_001);
    assert!(rows.iter().all(|r| r.split(',').count() == cols));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["--net", "missing.net", "solve-eq"]).0, 2);
    assert_eq!(run(&["--net", "3gen", "certify", "stability", "--state", "1,2"]).0, 2);
    assert_eq!(run(&["--gamma", "2", "solve-eq"]).0, 2);
    assert!(Cli::try_parse_from(["gridcert", "certify", "resiliency", "--mu", "1", "--mu-search"]).is_err());
}

#[test]
fn empty_screen_has_no_scenarios() {
    let list = write("empty.txt", "# nothing\n\n");
    let (code, r) = run(&["--net", "3gen", "screen", "--contingencies", path(&list), "--mu", "0.3"]);
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r["schema"], 1);
    assert_eq!(r["result"]["scenarios"].as_array().unwrap().len(), 0);
}

#[test]
fn screen_three_lines_and_cached_certificate() {
    let list = write("three.txt", "1-2 0.1\n1-3 0.1\n2-3 0.2\n");
    let cert = scratch("cert.json");
    let (code, fresh) = run(&[
        "--net", "3gen", "screen", "--contingencies", path(&list), "--mu", "0.3", "--save-certificate", path(&cert),
    ]);
    assert_eq!(code, 1);
    let fresh = fresh.unwrap();
    let entries = fresh["result"]["scenarios"].as_array().unwrap();
    let keys: Vec<&str> = entries.iter().map(|e| e["line"].as_str().unwrap()).collect();
    assert_eq!(keys, ["1-2", "1-3", "2-3"]);
    let verdicts: Vec<&str> = entries.iter().map(|e| e["verdict"]["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["certified", "certified", "not-certified"]);
    assert!(fresh["result"]["lmi_solves"].as_u64().unwrap() >= 1);

    let (_, cached) = run(&["--net", "3gen", "screen", "--contingencies", path(&list), "--certificate", path(&cert)]);
    let cached = cached.unwrap();
    assert_eq!(cached["result"]["lmi_solves"], 0);
    assert_eq!(cached["result"]["scenarios"], fresh["result"]["scenarios"]);

    // a certificate for another network is refused
    let (code, _) = run(&["--net", "2bus", "screen", "--contingencies", path(&list), "--certificate", path(&cert)]);
    assert_eq!(code, 2);
}

#[test]
fn screen_is_independent_of_worker_count() {
    let list = write("workers.txt", "1-2 0.05\n2-3 0.15\n1-3 0.1\n1-2 0.12\n");
    let go = |w: &str| {
        run(&["--net", "3gen", "--seed", "3", "screen", "--contingencies", path(&list), "--mu", "0.3", "--workers", w])
            .1
            .unwrap()
    };
    assert_eq!(go("1"), go("4"));
}

#[test]
fn solve_eq_two_bus() {
    let r = run(&["solve-eq"]).1.unwrap();
    let a = r["result"]["equilibrium"]["angles"][0].as_f64().unwrap();
    assert!((a - std::f64::consts::PI / 6.0).abs() < 1e-10);
    assert_eq!(r["result"]["within_gamma"], true);
    assert_eq!(run(&["check-sync"]).0, 0);
}

#[test]
fn check_sync_exit_codes() {
    assert_eq!(run(&["--net", "3gen", "check-sync"]).0, 0);
    assert_eq!(run(&["--net", "3gen", "--gamma", "0.01", "check-sync"]).0, 1);
}

#[test]
fn timings_only_on_request() {
    let args = ["--net", "3gen", "certify", "stability", "--state", "0.1,0.2,-0.3"];
    let plain = run(&args).1.unwrap();
    assert!(plain.get("timings").is_none());
    let timed = run(&[&["--timings"][..], &args[..]].concat()).1.unwrap();
    assert!(timed["timings"].is_array());
}

#[test]
fn validate_resiliency_confirms() {
    let (code, r) = run(&["--net", "2bus", "validate", "--line", "1-2", "--mu", "6", "--tau", "0.5"]);
    assert_eq!(code, 0, "{r:?}");
}

#[test]
fn trip_that_islands_is_an_error() {
    assert_eq!(run(&["--net", "2bus", "check-sync", "--trip", "1-2"]).0, 2);
    let (code, r) = run(&["--net", "case118", "--gamma", "pi/12", "check-sync", "--trip", "42-49"]);
    assert_eq!(code, 1);
    assert!(r.unwrap()["result"]["margin"].as_f64().unwrap() > 0.0);
}
