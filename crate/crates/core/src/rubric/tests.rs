use super::*;
use crate::check::CheckStatus;
use crate::source::SourceFile;

fn grade_src(src: &str, rubric: &Rubric) -> GradeReport {
    grade(SourceFile::new("s.pde", src), rubric, "s")
}

#[test]
fn builtin_rubrics_load() {
    let counts: Vec<(u8, usize)> = builtin_rubrics().iter().map(|(n, r)| (*n, r.items.len())).collect();
    assert_eq!(counts, [(1, 11), (2, 14), (3, 18), (4, 23)]);
    let a1 = builtin_rubric(1).unwrap();
    assert_eq!(a1.max_score, 20);
    assert!(a1
        .items
        .iter()
        .any(|i| i.feedback == "Use at least one stroke() function"));
    let a4 = builtin_rubric(4).unwrap();
    let f = a4
        .items
        .iter()
        .find(|i| i.check == CheckId::CreatedFunctionsExist)
        .unwrap();
    assert_eq!(f.params.functions, ["displayScores", "displayBall", "displayPaddles"]);
}

#[test]
fn unknown_check_is_a_load_error() {
    let err =
        Rubric::from_toml("assignment_id = 1\n[[items]]\ncheck = \"noSuchCheck\"\npoints = 1\nfeedback = \"x\"\n")
            .unwrap_err()
            .to_string();
    assert!(err.contains("noSuchCheck"), "{err}");
    assert!(err.contains("checkTabs"), "{err}");
}

#[test]
fn schema_errors_name_the_field() {
    let err = Rubric::from_toml("assignment_id = 1\nmax_scor = 20\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("max_scor"), "{err}");
    let err = Rubric::from_toml("assignment_id = 1\n[[items]]\ncheck = \"checkTabs\"\npoints = 0\nfeedback = \"x\"\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("points"), "{err}");
}

#[test]
fn duplicate_items_rejected() {
    let item = "[[items]]\ncheck = \"checkTabs\"\npoints = 1\nfeedback = \"x\"\n";
    let err = Rubric::from_toml(&format!("assignment_id = 1\n{item}{item}")).unwrap_err();
    assert!(err.to_string().contains("more than once"));
}

#[test]
fn empty_rubric_gives_full_marks() {
    let r = Rubric::from_toml("assignment_id = \"custom\"").unwrap();
    assert_eq!(r.max_score, 20);
    let rep = grade_src("void setup(){}", &r);
    assert_eq!(rep.score, 20);
    assert!(rep.feedback_lines.is_empty());
}

#[test]
fn round_trips_through_toml() {
    for (_, r) in builtin_rubrics() {
        assert_eq!(Rubric::from_toml(&r.to_toml()).unwrap(), r);
    }
}

#[test]
fn empty_file_is_fatal() {
    let r = builtin_rubric(1).unwrap();
    let rep = grade_src("", &r);
    assert_eq!(rep.score, 0);
    assert!(rep.fatal.is_some());
    let text = render_report(&rep);
    assert!(text.contains("Score: 0/20"));
    assert!(text.contains("could not be graded"));
}

#[test]
fn failed_item_costs_its_points_with_one_line() {
    let r = builtin_rubric(1).unwrap();
    let src = crate::corpus::reference(1).unwrap().replace("\tstroke(255);\n", "");
    let rep = grade_src(&src, &r);
    assert_eq!(rep.score, 18);
    assert_eq!(rep.feedback_lines, ["Use at least one stroke() function"]);
    let text = render_report(&rep);
    assert_eq!(text.matches("\n- ").count(), 1);
}

#[test]
fn error_policy_deduct_and_waive() {
    let toml = |policy: &str| {
        format!(
            "assignment_id = 2\n[[items]]\ncheck = \"checkMovingBall\"\npoints = 2\nfeedback = \"Move it\"\non_error = \"{policy}\"\n"
        )
    };
    // No ellipse at all: the check is skipped.
    let src = "void setup(){ fullScreen(); }\nvoid draw(){ rect(0, 0, 10, 10); }";
    let deduct = grade_src(src, &Rubric::from_toml(&toml("deduct")).unwrap());
    assert_eq!(deduct.item_results[0].status, CheckStatus::Skipped);
    assert_eq!(deduct.score, 18);
    assert!(deduct.feedback_lines[0].starts_with(COULD_NOT_VERIFY));
    let waive = grade_src(src, &Rubric::from_toml(&toml("waive")).unwrap());
    assert_eq!(waive.score, 20);
    assert_eq!(waive.feedback_lines.len(), 1);
    assert!(waive.feedback_lines[0].starts_with(COULD_NOT_VERIFY));
    assert!(waive.feedback_lines[0].ends_with(WAIVED));
}

#[test]
fn runtime_fault_is_an_error_result() {
    let r = Rubric::from_toml(
        "assignment_id = 2\n[[items]]\ncheck = \"checkMovingBall\"\npoints = 2\nfeedback = \"Move it\"\n",
    )
    .unwrap();
    let src = "int z = 0;\nvoid setup(){ fullScreen(); }\nvoid draw(){\n\tellipse(width/2, height/2, 10, 10);\n\tint q = 5 / z;\n}";
    let rep = grade_src(src, &r);
    assert_eq!(rep.item_results[0].status, CheckStatus::Error);
    assert!(rep.feedback_lines[0].contains("line 5"), "{:?}", rep.feedback_lines);
}

#[test]
fn report_layout() {
    let r = builtin_rubric(1).unwrap();
    let rep = grade_src(crate::corpus::reference(1).unwrap(), &r);
    assert_eq!(render_report(&rep), "Student: s\nAssignment: 1\nScore: 20/20\n");
}
