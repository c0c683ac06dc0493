use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn ctree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctree"))
        .args(args)
        .env_remove("CTREE_PATH_BOUND")
        .env_remove("CTREE_VAR_BOUND")
        .output()
        .expect("run ctree")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_reports_witness_and_exit_codes() {
    let example = corpus("example.cnf");
    let o = ctree(&["solve", example.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(stdout(&o), "s SATISFIABLE\nv -1 -2 3 -4 0\n");

    let o = ctree(&["solve", corpus("contradiction.cnf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o), "s UNSATISFIABLE\n");
}

#[test]
fn forced_golden_is_wrongly_refuted() {
    let golden = corpus("golden.cnf");
    let golden = golden.to_str().unwrap();
    let o = ctree(&[
        "solve",
        golden,
        "--engine",
        "reconstructed",
        "--force",
        "c,alpha",
    ]);
    assert_eq!(o.status.code(), Some(20));
    let o = ctree(&["solve", golden, "--force", "c,alpha"]);
    assert_eq!(o.status.code(), Some(10));
    let o = ctree(&[
        "solve",
        golden,
        "--engine",
        "reconstructed",
        "--force",
        "c,alpha",
        "--step3",
        "off",
    ]);
    assert_eq!(o.status.code(), Some(10));
}

#[test]
fn compare_exit_codes() {
    let golden = corpus("golden.cnf");
    let o = ctree(&["compare", golden.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(30));
    assert!(stdout(&o).contains("derived pair: {c, alpha} (not a contradiction pair)"));

    let o = ctree(&["compare", corpus("example.cnf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let o = ctree(&["compare", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["reports"].as_array().unwrap().len(), 0);
}

#[test]
fn errors_exit_one() {
    assert_eq!(ctree(&["solve", "/nonexistent.cnf"]).status.code(), Some(1));
    assert_eq!(
        ctree(&["compare", "--step3", "sometimes"]).status.code(),
        Some(1)
    );
    assert_eq!(ctree(&["frobnicate"]).status.code(), Some(1));
    let golden = corpus("golden.cnf");
    let o = ctree(&["solve", golden.to_str().unwrap(), "--force", "nobody"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown literal"));
}

#[test]
fn bounds_come_from_the_environment() {
    let golden = corpus("golden.cnf");
    let o = Command::new(env!("CARGO_BIN_EXE_ctree"))
        .args(["compare", golden.to_str().unwrap()])
        .env("CTREE_PATH_BOUND", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bound 4"));

    let o = Command::new(env!("CARGO_BIN_EXE_ctree"))
        .args(["solve", golden.to_str().unwrap()])
        .env("CTREE_VAR_BOUND", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generate_is_idempotent_and_reproduces_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for _ in 0..2 {
        let o = ctree(&["generate", "--n", "0", "--seed", "1", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    let written = std::fs::read(dir.path().join("family_n0_seed1.cnf")).unwrap();
    assert_eq!(written, std::fs::read(corpus("golden.cnf")).unwrap());

    for seed in 1..=3 {
        let seed = seed.to_string();
        let o = ctree(&["generate", "--n", "2", "--seed", &seed, "--out", out]);
        assert_eq!(o.status.code(), Some(0));
        let file = dir.path().join(format!("family_n2_seed{seed}.cnf"));
        let o = ctree(&["compare", file.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(30));
    }
}
