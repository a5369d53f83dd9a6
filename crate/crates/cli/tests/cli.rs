use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra-gap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("spectra-gap-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn eval_sqrt5() {
    let o = run(&["eval", "per(1) 1* per(1)", "--digits", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2.2360679775\n");
    let o = run(&["eval", "per(1) 1* per(1)", "--digits", "10", "--truncate"]);
    assert_eq!(stdout(&o), "2.2360679774\n");
}

#[test]
fn eval_json() {
    let o = run(&["eval", "per(2) 2* per(2)", "--json", "--digits", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["decimal"], "2.828427");
    assert_eq!(v["exact"], "2·sqrt(2)");
}

#[test]
fn hausdorff_bound() {
    let o = run(&["hausdorff", "--digits", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("delta0 = 9.109424338811e-8\n"), "{s}");
    assert!(s.contains("3973474319367040·sqrt(87)"));
}

#[test]
fn tree_writes_dot() {
    let path = scratch("tree").join("t.dot");
    let o = run(&["tree", "21233*2111", "--preset", "omega1", "--dot", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("single open chain ending at 211121233*21112123"));
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph tree {"));
}

#[test]
fn exit_codes() {
    // a window margin below the requested one
    assert_eq!(run(&["certify", "33*23", "--preset", "omega2", "--margin", "1e-2"]).status.code(), Some(1));
    // the same bound holds for the Markov value by case split
    assert_eq!(run(&["certify", "33*23", "--preset", "omega2", "--margin", "1e-2", "--derive"]).status.code(), Some(0));
    assert_eq!(run(&["eval", "per(4) 1*"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "13*"]).status.code(), Some(2));
    assert_eq!(run(&["endpoint", "j", "--preset", "nowhere"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn identical_runs_identical_bytes() {
    let a = run(&["verify-region", "--preset", "omega1", "--json", "--threads", "1"]);
    let b = run(&["verify-region", "--preset", "omega1", "--json", "--threads", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["status"], "premises-verified");
}

#[test]
fn ledger_build_matches_stored() {
    let path = scratch("ledger").join("omega2.jsonl");
    let o = run(&["ledger", "build", "--preset", "omega2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let built = std::fs::read_to_string(&path).unwrap();
    let stored = include_str!("../../core/data/omega2.ledger.jsonl");
    assert_eq!(built, stored);
    assert_eq!(run(&["ledger", "check", "--file", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn endpoint_with_minimax() {
    let o = run(&["endpoint", "J", "--preset", "omega1", "--digits", "17"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("j0 + 8.42651187285706"), "{s}");
    assert!(s.contains("minimax crossing at n = 4"));
}

#[test]
fn propagate_replays() {
    let o = run(&["propagate", "2111{ws}2123", "--preset", "omega1", "--arms", "17,17", "--drop", "j"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("-> 211121233211121233*2111212332111212 (branching)"), "{s}");
    assert!(s.ends_with("replay against the ledger: ok\n"));
}

#[test]
fn data_dir_override() {
    let dir = scratch("data");
    std::fs::write(
        dir.join("toy.toml"),
        "name = \"toy\"\nword = \"1\"\nthreshold = \"per(1*)\"\nalphabet = 3\ntranspose_closed = true\nmax_extension = 4\n\n[[ledger]]\nword = \"2*\"\nprovenance = \"certified\"\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_spectra-gap"))
        .args(["ledger", "check", "--preset", "toy"])
        .env("SPECTRA_GAP_DATA", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1 entries, 0 failed"));
}
