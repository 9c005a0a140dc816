use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn chm() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chm"));
    cmd.env_remove("CHM_DEFAULT_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    chm().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = chm()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    // Usage errors exit before reading, which closes the pipe early.
    let _ = child.stdin.take().unwrap().write_all(input.as_bytes());
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.chm.json"));
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let out = run(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn list_groups_by_size() {
    let out = run(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("N=1\n"));
    assert!(text.contains("N=16\n"));
    assert!(text.contains("  F4 "));
    let json: Value = serde_json::from_slice(&run(&["list", "--json"]).stdout).unwrap();
    assert_eq!(json["kind"], "catalogue");
    assert_eq!(json["report"].as_array().unwrap().len(), 69);
}

#[test]
fn gen_with_exact_turns() {
    let out = run(&["gen", "F4", "--param", "a=1/4", "--turns"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["representation"], "phases_turns");
    // i·exp(i·π/2) = −1.
    assert_eq!(doc["phases_turns"][1][1], "1/2");
    assert_eq!(doc["meta"]["name"], "F4");
}

#[test]
fn gen_argument_errors_are_usage_errors() {
    assert_eq!(code(&run(&["gen", "NOPE"])), 64);
    assert_eq!(code(&run(&["gen", "F6", "--param", "a=1"])), 64);
    assert_eq!(code(&run(&["gen", "F6", "--param", "z=1", "--param", "a=1"])), 64);
    assert_eq!(code(&run(&["gen", "F4", "--param", "a=x"])), 64);
    assert_eq!(code(&run(&["gen", "F4", "--param", "a=1", "--param", "a=2"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn verify_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let f6 = gen(dir.path(), "f6", &["F6", "--param", "a=0.3", "--param", "b=1.7"]);
    let out = run(&["verify", p(&f6)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("pass "));

    let c7c = gen(dir.path(), "c7c", &["C7C"]);
    assert_eq!(code(&run(&["verify", p(&c7c)])), 2);
    assert_eq!(code(&run(&["verify", p(&c7c), "--tol", "1e-4"])), 0);
    let out = chm().args(["verify", p(&c7c)]).env("CHM_DEFAULT_TOL", "1e-4").output().unwrap();
    assert_eq!(code(&out), 0);
    let out = chm().args(["verify", p(&c7c)]).env("CHM_DEFAULT_TOL", "lots").output().unwrap();
    assert_eq!(code(&out), 64);

    let ones = dir.path().join("ones.chm.json");
    std::fs::write(
        &ones,
        r#"{"format_version":"1","n":2,"representation":"phases_turns","phases_turns":[["0/1","0/1"],["0/1","0/1"]]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["verify", p(&ones)])), 2);
    assert_eq!(code(&run(&["defect", p(&ones)])), 65);
}

#[test]
fn input_errors_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.chm.json");
    assert_eq!(code(&run(&["verify", p(&missing)])), 74);
    let bad = dir.path().join("bad.chm.json");
    std::fs::write(&bad, "{\"n\": 2}").unwrap();
    let out = run(&["verify", p(&bad)]);
    assert_eq!(code(&out), 65);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.chm.json"));
    let unreduced = dir.path().join("unreduced.chm.json");
    std::fs::write(
        &unreduced,
        r#"{"format_version":"1","n":1,"representation":"phases_turns","phases_turns":[["2/4"]]}"#,
    )
    .unwrap();
    let out = run(&["verify", p(&unreduced)]);
    assert_eq!(code(&out), 65);
    assert!(String::from_utf8_lossy(&out.stderr).contains("phases_turns[0][0]"));
}

#[test]
fn stdin_and_stdout_pipe() {
    let doc = stdout(&run(&["gen", "F6"]));
    let out = run_with_stdin(&["dephase", "-"], &doc);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 6);
    let out = run_with_stdin(&["defect", "-"], &doc);
    assert_eq!(stdout(&out), "4\n");
    assert_eq!(code(&run_with_stdin(&["tensor", "-", "-"], &doc)), 64);
}

#[test]
fn defect_and_kernel() {
    let dir = TempDir::new().unwrap();
    let f4 = gen(dir.path(), "f4", &["F4"]);
    let text = stdout(&run(&["defect", p(&f4), "--kernel"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("1"));
    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split_whitespace().count() == 4));
    let s6 = gen(dir.path(), "s6", &["S6"]);
    assert_eq!(stdout(&run(&["defect", p(&s6)])), "0\n");
}

#[test]
fn invariants_are_rounded_without_negative_zero() {
    let dir = TempDir::new().unwrap();
    let f2 = gen(dir.path(), "f2", &["F2"]);
    let out = stdout(&run(&["invariants", p(&f2)]));
    assert_eq!(out, "-1.00000000 0.00000000\n1.00000000 0.00000000\n");
    let out = stdout(&run(&["invariants", p(&f2), "--tol-cluster", "1e-3", "--multiplicities"]));
    assert_eq!(out, "-1.000 0.000 4\n1.000 0.000 12\n");
}

#[test]
fn equivalence_outcomes() {
    let dir = TempDir::new().unwrap();
    let a = gen(dir.path(), "a", &["F4", "--param", "a=1/2", "--turns"]);
    // 3.14159265 is 3.6e-9 short of π, so the default 1e-9 tolerance is too tight.
    let b = gen(dir.path(), "b", &["F4", "--param", "a=3.14159265"]);
    let out = run(&["equiv", p(&a), p(&b), "--tol", "1e-7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let w: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(w["kind"], "equivalence_witness");
    assert_eq!(code(&run(&["equiv", p(&a), p(&b)])), 3);

    let f4 = gen(dir.path(), "f4", &["F4"]);
    let f2 = gen(dir.path(), "f2", &["F2"]);
    let f2f2 = dir.path().join("f2f2.chm.json");
    assert_eq!(code(&run(&["tensor", p(&f2), p(&f2), "-o", p(&f2f2)])), 0);
    let out = run(&["equiv", p(&f4), p(&f2f2)]);
    assert_eq!(code(&out), 3);
    assert_eq!(stdout(&out), "not equivalent\n");

    let f16 = gen(dir.path(), "f16", &["F16"]);
    let g16 = dir.path().join("g16.chm.json");
    let params: Vec<String> = "abcdefghijklmnopr".chars().map(|c| format!("{c}=0.1")).collect();
    let mut args = vec!["gen", "F16", "-o", p(&g16)];
    for s in &params {
        args.push("--param");
        args.push(s);
    }
    assert_eq!(code(&run(&args)), 0);
    let c = code(&run(&["equiv", p(&f16), p(&g16), "--budget", "3"]));
    assert!(c == 4 || c == 3, "exit {c}");
    assert_eq!(code(&run(&["equiv", p(&f2), p(&f4)])), 65);
}

#[test]
fn unbiased_pairs() {
    let dir = TempDir::new().unwrap();
    let f2 = gen(dir.path(), "f2", &["F2"]);
    let h = dir.path().join("h.chm.json");
    std::fs::write(
        &h,
        r#"{"format_version":"1","n":2,"representation":"phases_turns","phases_turns":[["0/1","0/1"],["1/4","3/4"]]}"#,
    )
    .unwrap();
    let out = run(&["mub", p(&f2), p(&h)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "unbiased\n");
    assert_eq!(code(&run(&["mub", p(&f2), p(&f2)])), 2);
}

#[test]
fn constructions() {
    let dir = TempDir::new().unwrap();
    let f2 = gen(dir.path(), "f2", &["F2"]);
    let f4 = gen(dir.path(), "f4", &["F4"]);
    let dita = dir.path().join("dita.chm.json");
    let out = run(&["dita", p(&f2), p(&f2), p(&f2), "--e", "1/4", "--turns", "-o", p(&dita)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&run(&["verify", p(&dita)])), 0);
    // Swapping the middle columns gives F4; the search confirms equivalence.
    assert_eq!(code(&run(&["equiv", p(&dita), p(&f4)])), 0);
    assert_eq!(code(&run(&["dita", p(&f2), p(&f2)])), 65);
    assert_eq!(code(&run(&["dita", p(&f2), p(&f2), p(&f2), "--e", "1,2"])), 64);

    let out = run(&["double", p(&f2), p(&f2), "--e", "0.7"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 4);

    let out = run(&["quadruple", p(&f2), p(&f2), p(&f2), p(&f2), "--e1", "0.1", "--e2", "0.2", "--e3", "0.3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let q = dir.path().join("q.chm.json");
    std::fs::write(&q, &out.stdout).unwrap();
    assert_eq!(code(&run(&["verify", p(&q)])), 0);
}

#[test]
fn chains_and_patterns() {
    let dir = TempDir::new().unwrap();
    let f4 = gen(dir.path(), "f4", &["F4"]);
    let out = stdout(&run(&["chains", p(&f4), "0", "2"]));
    assert_eq!(
        out,
        "1.000000000000 0.000000000000\n-1.000000000000 0.000000000000\n1.000000000000 0.000000000000\n-1.000000000000 0.000000000000\n"
    );
    assert_eq!(code(&run(&["chains", p(&f4), "2", "1"])), 65);

    let report: Value = serde_json::from_slice(&run(&["patterns", p(&f4)]).stdout).unwrap();
    assert_eq!(report["kind"], "pattern_spaces");
    let spaces = report["report"].as_array().unwrap();
    assert_eq!(spaces.len(), 1);
    assert_eq!(spaces[0]["dim"], 1);
    let f8 = gen(dir.path(), "f8", &["F8"]);
    assert_eq!(code(&run(&["patterns", p(&f8)])), 65);
}

#[test]
fn info_for_files_and_ids() {
    let dir = TempDir::new().unwrap();
    let f6 = gen(dir.path(), "f6", &["F6", "--param", "a=1/3", "--param", "b=0/1", "--turns"]);
    let out = stdout(&run(&["info", p(&f6)]));
    assert!(out.contains("name: F6\n"));
    assert!(out.contains("exact: true\n"));
    assert!(out.contains("butson_order: 6\n"));
    assert!(out.contains("hadamard: true\n"));
    let out = stdout(&run(&["info", "--id", "C7C"]));
    assert!(out.contains("approximate: true\n"));
    assert!(out.contains("hadamard_tol: 1e-4\n"));
    assert_eq!(code(&run(&["info", "--id", "Q9"])), 64);
    assert_eq!(code(&run(&["info"])), 64);
}
