use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pongrade");

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn reference(n: u8) -> String {
    fs::read_to_string(format!("{CORPUS}/a{n}/reference.pde")).unwrap()
}

fn submissions(dir: &Path, files: &[(&str, &str)]) {
    fs::create_dir_all(dir).unwrap();
    for (name, text) in files {
        fs::write(dir.join(name), text).unwrap();
    }
}

#[test]
fn grade_clean_batch_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in");
    let out = tmp.path().join("out");
    submissions(&src, &[("ama.pde", &reference(2)), ("kofi.pde", &reference(2))]);
    let o = run(&[
        "grade",
        "--rubric",
        "builtin:2",
        "--submissions",
        src.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("ama.txt")).unwrap();
    assert_eq!(report, "Student: ama\nAssignment: 2\nScore: 20/20\n");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn fatal_submission_exits_three_after_finishing() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in");
    let out = tmp.path().join("mail");
    submissions(&src, &[("a.pde", &reference(1)), ("b.pde", "")]);
    let rubric = format!("{CORPUS}/rubrics/assignment1.toml");
    let o = run(&[
        "grade",
        "--rubric",
        &rubric,
        "--submissions",
        src.to_str().unwrap(),
        "--mail-dir",
        out.to_str().unwrap(),
        "--parallel",
        "2",
    ]);
    assert_eq!(code(&o), 3);
    assert!(out.join("a.txt").is_file() && out.join("b.txt").is_file());
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("\nb,0,true,\n"), "{summary}");
}

#[test]
fn io_failures_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nowhere");
    let o = run(&[
        "grade",
        "--rubric",
        "builtin:1",
        "--submissions",
        missing.to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let o = run(&["check-rubric", tmp.path().join("none.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(code(&run(&["grade"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(
        &bad,
        "assignment_id = 1\n[[items]]\ncheck = \"checkWobble\"\npoints = 1\nfeedback = \"x\"\n",
    )
    .unwrap();
    let o = run(&["check-rubric", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("checkWobble"), "{err}");
    let o = run(&["grade", "--rubric", "builtin:9", "--submissions", ".", "--out", "x"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn compare_prints_rows_and_mae() {
    let o = run(&["compare", "--pairs", &format!("{CORPUS}/tables/assignment3.csv")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    assert!(text.ends_with("Mean absolute error = 1.7\n"), "{text}");

    let tmp = tempfile::tempdir().unwrap();
    let pairs = tmp.path().join("p.csv");
    fs::write(&pairs, "student_id,autograd,instructor\na,1,1\nb,2,two\n").unwrap();
    let o = run(&["compare", "--pairs", pairs.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
}

#[test]
fn check_rubric_and_list() {
    let o = run(&["check-rubric", &format!("{CORPUS}/rubrics/assignment4.toml")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("all items pass"));
    let o = run(&["rubrics", "list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("builtin:1\t11 items"), "{text}");
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("check-rubric"));
}
