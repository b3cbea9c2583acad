use std::fs;
use std::path::Path;

use pongrade_core::corpus;
use pongrade_core::pipeline::{
    compare_str, grade_batch, ingest, validate_rubric, validate_rubric_file, BatchOptions, PipelineError,
    ALL_ITEMS_PASS, SUMMARY_FILE,
};
use pongrade_core::rubric::{builtin_rubric, Rubric, RubricError};
use pongrade_core::CheckId;

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn ids(dir: &Path) -> Vec<String> {
    ingest(dir, None)
        .unwrap()
        .entries
        .into_iter()
        .map(|e| e.student_id)
        .collect()
}

#[test]
fn ingest_orders_by_student_id_and_skips_other_files() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "a1_kofi.pde", "");
    write(tmp.path(), "a1_ama.pde", "");
    write(tmp.path(), "README.txt", "");
    fs::create_dir(tmp.path().join("old")).unwrap();
    let m = ingest(tmp.path(), None).unwrap();
    assert_eq!(ids(tmp.path()), ["a1_ama", "a1_kofi"]);
    assert_eq!(m.warnings.len(), 2);
    assert!(m.warnings.iter().any(|w| w.contains("README.txt")));
}

#[test]
fn ingest_rejects_empty_directory() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "notes.md", "");
    assert!(matches!(
        ingest(tmp.path(), None),
        Err(PipelineError::EmptyDirectory(_))
    ));
}

#[test]
fn manifest_names_missing_file() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "here.pde", "");
    let manifest = tmp.path().join("m.csv");
    fs::write(&manifest, "student_id,file_path\nama,here.pde\nkofi,gone.pde\n").unwrap();
    let err = ingest(tmp.path(), Some(&manifest)).unwrap_err();
    assert!(err.to_string().contains("gone.pde"), "{err}");
    assert!(matches!(err, PipelineError::MissingFile { ref student_id, .. } if student_id == "kofi"));
}

#[test]
fn manifest_lists_duplicate_ids() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "x.pde", "");
    let manifest = tmp.path().join("m.csv");
    fs::write(
        &manifest,
        "student_id,file_path\nama,x.pde\nkofi,x.pde\nama,x.pde\nkofi,x.pde\nyaw,x.pde\n",
    )
    .unwrap();
    match ingest(tmp.path(), Some(&manifest)) {
        Err(PipelineError::DuplicateIds(d)) => assert_eq!(d, ["ama", "kofi"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn manifest_rejects_ids_that_escape_the_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "x.pde", "");
    let manifest = tmp.path().join("m.csv");
    fs::write(&manifest, "student_id,file_path\n../evil,x.pde\n").unwrap();
    assert!(matches!(
        ingest(tmp.path(), Some(&manifest)),
        Err(PipelineError::Manifest { .. })
    ));
}

fn three_file_corpus(dir: &Path) {
    write(dir, "good.pde", corpus::reference(1).unwrap());
    let stroke = corpus::mutants(1).find(|m| m.target() == CheckId::Strokes).unwrap();
    write(dir, "nostroke.pde", stroke.source);
    write(dir, "blank.pde", "   \n");
}

#[test]
fn batch_writes_reports_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in");
    let out = tmp.path().join("out");
    fs::create_dir(&src).unwrap();
    three_file_corpus(&src);
    let rubric = builtin_rubric(1).unwrap();
    let rows = grade_batch(&ingest(&src, None).unwrap(), &rubric, &out, &BatchOptions::default()).unwrap();
    assert_eq!(rows.len(), 3);
    for id in ["good", "nostroke", "blank"] {
        assert!(out.join(format!("{id}.txt")).is_file(), "{id}");
    }
    let summary = fs::read_to_string(out.join(SUMMARY_FILE)).unwrap();
    assert_eq!(
        summary,
        "student_id,score,fatal,failed_checks\nblank,0,true,\ngood,20,false,\nnostroke,18,false,checkStrokes\n"
    );
    let blank = fs::read_to_string(out.join("blank.txt")).unwrap();
    assert!(blank.contains("Score: 0/20"), "{blank}");
}

#[test]
fn unwritable_output_fails_before_grading() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in");
    fs::create_dir(&src).unwrap();
    three_file_corpus(&src);
    let blocker = tmp.path().join("out");
    fs::write(&blocker, "a file, not a directory").unwrap();
    let rubric = builtin_rubric(1).unwrap();
    let err = grade_batch(
        &ingest(&src, None).unwrap(),
        &rubric,
        &blocker,
        &BatchOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, PipelineError::Unwritable { .. }), "{err}");
    assert_eq!(fs::read_to_string(&blocker).unwrap(), "a file, not a directory");
}

#[test]
fn one_broken_submission_does_not_touch_the_others() {
    let tmp = tempfile::tempdir().unwrap();
    let alone = tmp.path().join("alone");
    let mixed = tmp.path().join("mixed");
    fs::create_dir(&alone).unwrap();
    fs::create_dir(&mixed).unwrap();
    let good = corpus::reference(4).unwrap();
    write(&alone, "s.pde", good);
    write(&mixed, "s.pde", good);
    write(
        &mixed,
        "r.pde",
        "void setup(){ fullScreen(); }\nvoid draw(){ ellipse(1,1,5,5); int z = 0; z = 1 / z; }",
    );
    write(&mixed, "t.pde", "void draw(){ while (true) { } }");
    write(&mixed, "u.pde", "{{{{ ((( void");
    let rubric = builtin_rubric(4).unwrap();
    let opts = BatchOptions {
        parallelism: 4,
        trace: false,
    };
    grade_batch(&ingest(&alone, None).unwrap(), &rubric, &alone.join("out"), &opts).unwrap();
    let rows = grade_batch(&ingest(&mixed, None).unwrap(), &rubric, &mixed.join("out"), &opts).unwrap();
    assert_eq!(rows.len(), 4);
    let read = |d: &Path| fs::read(d.join("out/s.txt")).unwrap();
    assert_eq!(read(&alone), read(&mixed));
}

#[test]
fn trace_files_hold_one_frame_per_line() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in");
    fs::create_dir(&src).unwrap();
    write(&src, "a.pde", corpus::reference(3).unwrap());
    let rubric = builtin_rubric(3).unwrap();
    let opts = BatchOptions {
        parallelism: 1,
        trace: true,
    };
    grade_batch(&ingest(&src, None).unwrap(), &rubric, &tmp.path().join("out"), &opts).unwrap();
    let trace = fs::read_to_string(tmp.path().join("out/a.trace.jsonl")).unwrap();
    let frames: Vec<serde_json::Value> = trace.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(frames.len(), 10);
    assert_eq!(frames[3]["index"], 3);
}

#[test]
fn compare_reports_mae_to_one_decimal() {
    let c = compare_str(corpus::grade_table(1).unwrap()).unwrap();
    let errors: Vec<u64> = c.rows.iter().map(|r| r.abs_error).collect();
    assert_eq!(errors, [0, 6, 0, 1, 0, 0, 0, 0, 0, 0]);
    assert_eq!(c.mae_text(), "0.7");
}

#[test]
fn rubric_dry_run() {
    assert_eq!(validate_rubric(&builtin_rubric(1).unwrap()), [ALL_ITEMS_PASS]);

    let mut impossible = builtin_rubric(4).unwrap();
    let item = impossible
        .items
        .iter_mut()
        .find(|i| i.check == CheckId::CreatedFunctionsExist)
        .unwrap();
    item.params.functions.push("drawNet".into());
    let diags = validate_rubric(&impossible);
    assert_eq!(diags.len(), 1);
    assert!(
        diags[0].contains("checkCreatedFunctionsExist") && diags[0].contains("drawNet"),
        "{diags:?}"
    );

    let custom = Rubric::from_toml(
        "assignment_id = \"lab\"\n[[items]]\ncheck = \"checkTabs\"\npoints = 1\nfeedback = \"Indent with tabs.\"\n",
    )
    .unwrap();
    assert!(validate_rubric(&custom)[0].contains("no bundled reference"));

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(
        &bad,
        "assignment_id = 1\n[[items]]\ncheck = \"checkTabs\"\npoints = 1\n",
    )
    .unwrap();
    let err = validate_rubric_file(&bad).unwrap_err();
    assert!(
        matches!(err, RubricError::Schema(ref m) if m.contains("feedback")),
        "{err}"
    );
}
