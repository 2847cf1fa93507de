mod common;

use std::path::Path;
use std::process::{Command, Output};

fn gml(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gml"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("GML_CACHE")
        .output()
        .expect("spawn gml")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn one_row_per_odd_prime() {
    let dir = tempfile::tempdir().unwrap();
    let out = gml(
        &["--pmin", "5", "--pmax", "100", "--n", "1", "--m", "3", "--emit", "csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with(
        "p,class,n,m,unweighted_all,closed_form,weighted,main_term,residual_norm,conjecture_ratio,N,T,maxS_norm,maxR_norm,weil_margin,diag_g3_ratio,diag_gen6_norm,runtime_ms\n"
    ));
    assert!(!csv.contains('\r'));
    let ps: Vec<u64> = rows(&csv).iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ps, common::primes(5, 100));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn three_mod_four_sixth_moment_is_the_integer_formula() {
    let dir = tempfile::tempdir().unwrap();
    let out = gml(
        &["--pmin", "5", "--pmax", "500", "--class", "3mod4", "--m", "3", "--emit", "csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let table = rows(&csv);
    assert!(!table.is_empty());
    for r in table {
        let p: u64 = r[0].parse().unwrap();
        assert_eq!(p % 4, 3);
        assert_eq!(r[1], "3mod4");
        let want = ((p - 1) * (10 * p * p * p - 25 * p * p - 4 * p - 1)) as f64;
        let brute: f64 = r[4].parse().unwrap();
        let closed: f64 = r[5].parse().unwrap();
        assert_eq!(closed, want, "p={p}");
        assert!((brute - want).abs() <= 1e-10 * want, "p={p}: {brute} vs {want}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--pmin", "5", "--pmax", "150", "--n", "1,2", "--seed", "7", "--emit", "csv,json,svg"];
    let read_all = |sub: &str| -> Vec<Vec<u8>> {
        ["report.csv", "report.json", "ratio.svg", "residual.svg"]
            .iter()
            .map(|name| std::fs::read(dir.path().join(sub).join(name)).unwrap())
            .collect()
    };
    assert_eq!(gml(&args, &dir.path().join("a")).status.code(), Some(0));
    let first = read_all("a");
    assert_eq!(gml(&args, &dir.path().join("a")).status.code(), Some(0));
    assert!(first == read_all("a"));

    // The worker count changes scheduling only; JSON echoes the config, so
    // compare the data files.
    let threaded = [&args[..], &["--workers", "3"]].concat();
    assert_eq!(gml(&threaded, &dir.path().join("b")).status.code(), Some(0));
    let other = read_all("b");
    assert!(first[0] == other[0] && first[2..] == other[2..]);
}

#[test]
fn exit_status_contract() {
    let dir = tempfile::tempdir().unwrap();
    let bad_range = gml(&["--pmin", "2", "--pmax", "50"], dir.path());
    assert_eq!(bad_range.status.code(), Some(1));
    let bad_flag = gml(&["--bogus"], dir.path());
    assert_eq!(bad_flag.status.code(), Some(1));
    let bad_m = gml(&["--m", "5"], dir.path());
    assert_eq!(bad_m.status.code(), Some(1));
    let help = gml(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));

    let faulty = gml(
        &["--pmin", "5", "--pmax", "40", "--m", "3", "--inject-fault", "13"],
        &dir.path().join("f"),
    );
    assert_eq!(faulty.status.code(), Some(2));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("f/report.json")).unwrap()).unwrap();
    let failures = json["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|f| f["p"] == 13));
}

#[test]
fn environment_cache_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let env_cache = dir.path().join("env");
    let flag_cache = dir.path().join("flag");
    let out = Command::new(env!("CARGO_BIN_EXE_gml"))
        .args(["--pmin", "5", "--pmax", "30", "--m", "1", "--cmax-pmax", "1000", "--cache"])
        .arg(&flag_cache)
        .arg("--out")
        .arg(dir.path().join("out"))
        .env("GML_CACHE", &env_cache)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_cache.join("constant_c.txt").exists());
    assert!(std::fs::read_dir(env_cache.join("records")).unwrap().count() > 0);
    assert!(!flag_cache.exists());
}
