use std::fs;

use frobdet::corpus::run_corpus;
use frobdet::pipeline::PipelineOptions;

#[test]
fn empty_directory_gives_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_corpus(dir.path(), 2, 0, None, &PipelineOptions::default()).unwrap();
    assert_eq!(summary.total, 0);
    assert!(dir.path().join("reports/summary.json").exists());
}

#[test]
fn mixed_corpus_is_classified_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cubic.case"), "p=2\npoly=x^3+y^3+z^3+x*y*z+x^2*y\n").unwrap();
    fs::write(dir.path().join("cubic3.case"), "p=3\npoly=x^3+y^3+z^3+2*x*y*z\nmode=curve\n").unwrap();
    // singular at (1:1:1)
    fs::write(dir.path().join("singular.case"), "p=2\npoly=x^3+y^3+z^3+x*y*z\n").unwrap();

    let opts = PipelineOptions::default();
    let first = run_corpus(dir.path(), 3, 7, None, &opts).unwrap();
    assert_eq!(first.total, 3);
    assert_eq!(first.verdicts.get("verified"), Some(&2));
    assert_eq!(first.verdicts.get("hypothesis-not-met"), Some(&1));
    let singular = first.cases.iter().find(|c| c.name == "singular.case").unwrap();
    assert_eq!(singular.exit_code, 2);

    let read = |name: &str| fs::read_to_string(dir.path().join("reports").join(name)).unwrap();
    let before: Vec<String> = ["cubic.json", "cubic3.json", "singular.json"].iter().map(|n| read(n)).collect();
    let second = run_corpus(dir.path(), 1, 7, None, &opts).unwrap();
    assert_eq!(second.total, 3, "the reports directory must not be read back as cases");
    let after: Vec<String> = ["cubic.json", "cubic3.json", "singular.json"].iter().map(|n| read(n)).collect();
    assert_eq!(before, after);
}

#[test]
fn malformed_case_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.case"), "p=4\npoly=x^3+y^3+z^3\n").unwrap();
    fs::write(dir.path().join("garbage.case"), "hello\n").unwrap();
    let summary = run_corpus(dir.path(), 1, 0, None, &PipelineOptions::default()).unwrap();
    assert!(summary.cases.iter().all(|c| c.exit_code == 1), "{:?}", summary.cases);
}
