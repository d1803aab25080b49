use std::process::{Command, Output};

fn frobdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobdet")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const CUBIC: &str = "x^3+y^3+z^3+x*y*z+x^2*y";

#[test]
fn analyze_verifies_an_ordinary_cubic_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = frobdet(&["analyze", "--p", "2", "--poly", CUBIC, "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("3x3"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["verdict"], "verified");
    assert_eq!(report["certificate"]["r"], 1);

    // the written report feeds straight back into verify
    let out = frobdet(&["verify", "--p", "2", "--poly", CUBIC, "--matrix", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("G^1"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&frobdet(&["analyze", "--p", "4", "--poly", CUBIC])), 1);
    assert_eq!(code(&frobdet(&["analyze", "--p", "2", "--poly", "x^3+y^2"])), 1);
    // singular at (1:1:1)
    assert_eq!(code(&frobdet(&["analyze", "--p", "2", "--poly", "x^3+y^3+z^3+x*y*z"])), 2);
    // smooth but not ordinary
    assert_eq!(code(&frobdet(&["analyze", "--p", "2", "--poly", "x^3+y^3+z^3"])), 3);
}

#[test]
fn verify_rejects_a_wrong_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"{"entries": [["x", "y", "0"], ["0", "x", "y"], ["z", "0", "x"]]}"#).unwrap();
    assert_eq!(code(&frobdet(&["verify", "--p", "2", "--poly", CUBIC, "--matrix", m.to_str().unwrap()])), 4);
}

#[test]
fn invariant_subcommands() {
    let out = frobdet(&["fedder", "--p", "2", "--poly", "x^3+y^3+z^3+w^3+x*y*z"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("degree_bound_ok: true"));
    let out = frobdet(&["hasse-witt", "--p", "7", "--poly", "x^3+y^3+z^3"]);
    assert!(stdout(&out).contains("ordinary: true"));
    let out = frobdet(&["resolve", "--p", "2", "--poly", CUBIC]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("relation degrees: [1, 1, 1]"), "{}", stdout(&out));
}

#[test]
fn search_is_seeded() {
    let a = frobdet(&["search", "--p", "3", "--d", "3", "--seed", "5"]);
    let b = frobdet(&["search", "--p", "3", "--d", "3", "--seed", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(code(&frobdet(&["search", "--p", "3", "--d", "3", "--budget", "0"])), 3);
}

#[test]
fn corpus_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.case"), format!("p=2\npoly={CUBIC}\n")).unwrap();
    let out = frobdet(&["corpus", "run", dir.path().to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verified: 1"));
    assert!(dir.path().join("reports/a.json").exists());
}
