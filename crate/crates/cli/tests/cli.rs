use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn toy(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy").join(name)
}

fn mergm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mergm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("MERGM_OUT")
        .output()
        .unwrap()
}

fn data_args() -> Vec<String> {
    let mut v = Vec::new();
    for (flag, file) in [
        ("--nodes", "nodes.csv"),
        ("--edges", "edges.csv"),
        ("--model", "model.json"),
        ("--chain", "chain.json"),
        ("--settings", "settings.json"),
    ] {
        v.push(flag.to_string());
        v.push(toy(file).display().to_string());
    }
    v
}

fn with<'a>(cmd: &'a str, extra: &'a [String]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(extra.iter().map(String::as_str));
    v
}

#[test]
fn describe_produces_table() {
    let dir = TempDir::new().unwrap();
    let args = data_args();
    let out = mergm(&with("describe", &args), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("descriptives.txt")).unwrap();
    assert!(text.contains("north") && text.contains("south") && text.contains("Average"));
}

#[test]
fn estimate_then_gof() {
    let dir = TempDir::new().unwrap();
    let mut args = data_args();
    args.extend(["--seed".to_string(), "3".to_string()]);
    let out = mergm(&with("estimate", &args), dir.path());
    let code = out.status.code().unwrap();
    assert!(code == 0 || code == 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("fit.json").exists());
    let out = mergm(&with("gof", &args), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let gof = fs::read_to_string(dir.path().join("gof.csv")).unwrap();
    assert!(gof.lines().count() > 10);
    let out = mergm(&with("correlate", &args), dir.path());
    assert!(out.status.success());
}

#[test]
fn same_seed_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut args = data_args();
    args.extend(["--seed".to_string(), "11".to_string()]);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        assert!(mergm(&with("simulate", &args), d).status.success());
        assert!(mergm(&with("stats", &args), d).status.success());
    }
    for f in ["simulation.csv", "stats.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn errors_are_machine_readable() {
    let dir = TempDir::new().unwrap();
    let out = mergm(&["estimate", "--nodes", toy("nodes.csv").to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("error.json")).unwrap();
    assert!(report.contains("missing_input"));
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_env");
    let out = Command::new(env!("CARGO_BIN_EXE_mergm"))
        .args(["describe", "--nodes"])
        .arg(toy("nodes.csv"))
        .arg("--edges")
        .arg(toy("edges.csv"))
        .env("MERGM_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("descriptives.csv").exists());
}
