use std::fs;
use std::process::{Command, Output};

fn nact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nact"))
        .args(args)
        .env_remove("NACT_MAX_STEPS")
        .env_remove("NACT_LEDGER")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_prints_the_opening() {
    let o = nact(&["enumerate", "--count", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "verum\nfalsum\nx in x\nnot x in x\n");
}

#[test]
fn jsonl_lines_parse_on_their_own() {
    for args in [
        &["enumerate", "--count", "30", "--format", "jsonl"][..],
        &["systems", "--format", "jsonl"],
        &["stratify", "forall x1: x1 in x", "--format", "jsonl"],
        &["model-check", "--system", "NACT#", "--max-size", "2", "--format", "jsonl"],
        &["prove", "--axiom", "set($Ru)", "--goal", "falsum", "--format", "jsonl"],
    ] {
        let o = nact(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let text = stdout(&o);
        assert!(!text.is_empty());
        for line in text.lines() {
            serde_json::from_str::<serde_json::Value>(line).unwrap();
        }
    }
}

#[test]
fn unstratifiable_is_a_successful_run() {
    let o = nact(&["stratify", "not x in x"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("Unstratifiable"));
    assert!(text.contains("t(x) = t(x) + 1"));
}

#[test]
fn systems_lists_presets_with_schemata() {
    let text = stdout(&nact(&["systems"]));
    assert!(text.lines().any(|l| l.starts_with("NACT+: Axiom5a, Axiom6c")));
    assert!(text.lines().any(|l| l.starts_with("NACT-SiNSA: SiNSA")));
}

#[test]
fn exit_codes() {
    assert_eq!(nact(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nact(&["stratify", "x in"]).status.code(), Some(2));
    assert_eq!(nact(&["sa", "x in x", "--system", "NACT-Nope"]).status.code(), Some(2));
    assert_eq!(nact(&["degree", "--ledger", "/nonexistent/ledger.jsonl"]).status.code(), Some(1));
    assert_eq!(nact(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "count = 3\n").unwrap();
    let o = nact(&["--config", cfg.to_str().unwrap(), "enumerate"]);
    assert_eq!(stdout(&o).lines().count(), 3);
    fs::write(&cfg, "count = 3\ncolour = \"red\"\n").unwrap();
    assert_eq!(nact(&["--config", cfg.to_str().unwrap(), "enumerate"]).status.code(), Some(2));
}

#[test]
fn run_resume_and_degree_through_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.jsonl");
    let two = dir.path().join("two.jsonl");
    let run = |ledger: &std::path::Path, count: &str, resume: bool| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nact"));
        c.args(["run", "--system", "NACT-PriNSA", "--count", count])
            .env("NACT_MAX_STEPS", "40")
            .env("NACT_LEDGER", ledger);
        if resume {
            c.arg("--resume");
        }
        let o = c.output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&one, "60", false);
    run(&two, "25", false);
    run(&two, "60", true);
    assert_eq!(fs::read(&one).unwrap(), fs::read(&two).unwrap());
    let o = nact(&["degree", "--ledger", one.to_str().unwrap(), "--window", "10"]);
    let text = stdout(&o);
    assert!(text.contains("estimate r_60"));
    assert!(text.contains("hypothesis"));
}
