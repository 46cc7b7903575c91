//! End-to-end tests of the command-line interface via the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_wcutset")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wcutset-cli-{name}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const CHAIN3: &str = "\
var X1 2
var X2 2
var X3 2
cpt X1
0.4 0.6
cpt X2 | X1
0.8 0.2
0.3 0.7
cpt X3 | X2
0.9 0.1
0.1 0.9
";

#[test]
fn gen_grid_counts_declared_variables() {
    let dir = tmpdir("grid");
    let path = dir.join("grid.net");
    run_ok(&[
        "gen", "grid", "--rows", "15", "--cols", "30", "--seed", "1",
        "--out", path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let vars = text.lines().filter(|l| l.starts_with("var ")).count();
    assert_eq!(vars, 450);
}

#[test]
fn gen_single_variable_net() {
    let out = run_ok(&["gen", "random", "--n", "1", "--roots", "1", "--quiet"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("var ")).count(), 1);
}

#[test]
fn gen_is_byte_deterministic() {
    let args = [
        "gen", "random", "--n", "40", "--roots", "4", "--parents", "2",
        "--seed", "11", "--quiet",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));
}

#[test]
fn cutset_mg_range_is_non_increasing() {
    let dir = tmpdir("mgrange");
    let path = dir.join("net.txt");
    run_ok(&[
        "gen", "random", "--n", "200", "--roots", "20", "--parents", "2",
        "--seed", "3", "--out", path.to_str().unwrap(), "--quiet",
    ]);
    let out = run_ok(&[
        "cutset", "--net", path.to_str().unwrap(), "--method", "mg",
        "--w", "1..6",
    ]);
    let sizes: Vec<usize> = out
        .lines()
        .filter(|l| l.starts_with("w="))
        .map(|l| {
            l.split_whitespace()
                .find_map(|t| t.strip_prefix("|C|="))
                .unwrap()
                .parse()
                .unwrap()
        })
        .collect();
    assert_eq!(sizes.len(), 6);
    for pair in sizes.windows(2) {
        assert!(pair[1] <= pair[0], "sizes not monotone: {sizes:?}");
    }
}

#[test]
fn cutset_file_round_trip() {
    let dir = tmpdir("cutfile");
    let net = dir.join("net.txt");
    let cut = dir.join("cutset.txt");
    write(&net, CHAIN3);
    run_ok(&[
        "cutset", "--net", net.to_str().unwrap(), "--method", "ga",
        "--w", "1", "--out", cut.to_str().unwrap(),
    ]);
    // Re-feed the emitted file through infer; the chain has no loops so the
    // file is empty and the run is exact.
    let csv = run_ok(&[
        "infer", "--net", net.to_str().unwrap(), "--algorithm", "cutset",
        "--cutset-source", "file", "--cutset-file", cut.to_str().unwrap(),
        "--quiet",
    ]);
    let exact = run_ok(&[
        "infer", "--net", net.to_str().unwrap(), "--algorithm", "exact",
        "--quiet",
    ]);
    assert_eq!(csv, exact);
}

#[test]
fn infer_exact_chain3_posterior() {
    let dir = tmpdir("exact");
    let net = dir.join("net.txt");
    let ev = dir.join("ev.txt");
    write(&net, CHAIN3);
    write(&ev, "X3 1\n");
    let csv = run_ok(&[
        "infer", "--net", net.to_str().unwrap(),
        "--evidence", ev.to_str().unwrap(), "--algorithm", "exact", "--quiet",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "variable,value,estimate");
    assert_eq!(lines.next().unwrap(), "X1,0,0.208000000");
    assert_eq!(lines.next().unwrap(), "X1,1,0.792000000");
    assert_eq!(lines.next().unwrap(), "X2,0,0.100000000");
    assert_eq!(lines.next().unwrap(), "X2,1,0.900000000");
    assert!(lines.next().is_none());
}

#[test]
fn eval_file_against_itself_is_zero() {
    let dir = tmpdir("evalself");
    let net = dir.join("net.txt");
    let csv = dir.join("m.csv");
    write(&net, CHAIN3);
    run_ok(&[
        "infer", "--net", net.to_str().unwrap(), "--algorithm", "exact",
        "--out", csv.to_str().unwrap(), "--quiet",
    ]);
    let out = run_ok(&["eval", csv.to_str().unwrap(), csv.to_str().unwrap()]);
    assert!(out.contains("mse,,0.000000000"));
    assert!(out.contains("delta,,0.000000000"));
}

#[test]
fn eval_detects_join_mismatch() {
    let dir = tmpdir("evalbad");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    write(&a, "variable,value,estimate\nX1,0,0.5\nX1,1,0.5\n");
    write(&b, "variable,value,estimate\nX2,0,0.5\nX2,1,0.5\n");
    let out = run(&["eval", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("X1") && err.contains("X2"), "{err}");
}

#[test]
fn eval_hand_perturbed_mse() {
    // Perturbing one binary variable by +0.1/-0.1 across 2 variables with 4
    // values total gives MSE = (0.01 + 0.01) / 4 = 0.005.
    let dir = tmpdir("evalmse");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    write(&a, "variable,value,estimate\nX1,0,0.308\nX1,1,0.692\nX2,0,0.1\nX2,1,0.9\n");
    write(&b, "variable,value,estimate\nX1,0,0.208\nX1,1,0.792\nX2,0,0.1\nX2,1,0.9\n");
    let out = run_ok(&["eval", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.contains("mse,,0.005000000"), "{out}");
}

#[test]
fn exit_code_usage() {
    let out = run(&["infer", "--algorithm", "warp"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_model_invalid() {
    let dir = tmpdir("badmodel");
    let net = dir.join("net.txt");
    write(&net, "var A 2\ncpt A\n0.9 0.3\n"); // not normalized
    let out = run(&["infer", "--net", net.to_str().unwrap(), "--algorithm", "exact"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_zero_evidence() {
    let dir = tmpdir("zeroev");
    let net = dir.join("net.txt");
    let ev = dir.join("ev.txt");
    // B copies A deterministically; observing disagreement has probability 0.
    write(
        &net,
        "var A 2\nvar B 2\ncpt A\n0.5 0.5\ncpt B | A\n1 0\n0 1\n",
    );
    write(&ev, "A 0\nB 1\n");
    let out = run(&[
        "infer", "--net", net.to_str().unwrap(),
        "--evidence", ev.to_str().unwrap(), "--algorithm", "exact",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn exit_code_width_guard() {
    // A 30x30 grid's induced width exceeds the exact-inference cap even
    // though every family is small.
    let dir = tmpdir("widthguard");
    let net = dir.join("net.txt");
    run_ok(&[
        "gen", "grid", "--rows", "30", "--cols", "30", "--seed", "1",
        "--out", net.to_str().unwrap(), "--quiet",
    ]);
    let out = run(&["infer", "--net", net.to_str().unwrap(), "--algorithm", "exact"]);
    assert_eq!(out.status.code(), Some(5));
}
