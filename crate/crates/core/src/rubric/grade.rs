use serde::Serialize;

use crate::check::{CheckId, CheckResult, CheckStatus};
use crate::dynamic_checks::{run_dynamic_check, DynamicContext};
use crate::sketch::{parse_source, Diagnostic};
use crate::source::SourceFile;
use crate::static_checks::{self as sc, StaticContext};

use super::{AssignmentId, ErrorPolicy, Rubric, RubricItem};

/// Prefix for feedback on items the grader could not evaluate.
pub const COULD_NOT_VERIFY: &str = "Could not verify: ";
/// Appended to an unverified item whose rubric waives its points.
pub const WAIVED: &str = " No points were deducted.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradeReport {
    pub student_id: String,
    pub assignment_id: AssignmentId,
    pub score: u32,
    pub max_score: u32,
    /// One result per rubric item, in rubric order.
    pub item_results: Vec<CheckResult>,
    pub feedback_lines: Vec<String>,
    /// Why the submission could not be graded at all.
    pub fatal: Option<String>,
}

impl GradeReport {
    /// Checks that cost the student points, in rubric order.
    pub fn failed_checks(&self, rubric: &Rubric) -> Vec<CheckId> {
        rubric
            .items
            .iter()
            .zip(&self.item_results)
            .filter(|(item, r)| deducts(item, r))
            .map(|(item, _)| item.check)
            .collect()
    }
}

fn deducts(item: &RubricItem, r: &CheckResult) -> bool {
    match r.status {
        CheckStatus::Pass => false,
        CheckStatus::Fail => true,
        CheckStatus::Error | CheckStatus::Skipped => item.on_error == ErrorPolicy::Deduct,
    }
}

fn run_static(ctx: &StaticContext, item: &RubricItem) -> CheckResult {
    match item.check {
        CheckId::Tabs => sc::check_tabs(ctx),
        CheckId::StatementsPerLine => sc::check_statements_per_line(ctx),
        CheckId::Comments => sc::check_comments(ctx),
        CheckId::Background => sc::check_background(ctx),
        CheckId::Fills => sc::check_fills(ctx),
        CheckId::Strokes => sc::check_strokes(ctx),
        CheckId::Ellipses => sc::check_ellipses(ctx),
        CheckId::Rects => sc::check_rects(ctx),
        CheckId::Scores => sc::check_scores(ctx),
        CheckId::SetupDraw => sc::check_setup_draw(ctx),
        CheckId::FullScreen => sc::check_full_screen(ctx),
        CheckId::CreatedFunctionsExist => sc::check_created_functions_exist(ctx, &item.params.functions),
        CheckId::MagicNumbers => sc::check_magic_numbers(ctx),
        id => CheckResult::error(id, format!("{id} is not a static check")),
    }
}

fn fatal_message(diags: &[Diagnostic]) -> String {
    let mut msg = String::from("Your submission could not be graded because no Processing code could be read from it.");
    if let Some(d) = diags.iter().find(|d| d.is_error()) {
        msg.push_str(&format!(
            " The first problem is at line {}: {}.",
            d.span.start_line, d.message
        ));
    }
    msg
}

fn with_lines(text: &str, r: &CheckResult) -> String {
    let lines = r.lines();
    match lines.as_slice() {
        [] => text.to_string(),
        [l] => format!("{text} (line {l})"),
        many => {
            let list: Vec<String> = many.iter().map(u32::to_string).collect();
            format!("{text} (lines {})", list.join(", "))
        }
    }
}

/// Grades one submission. Dynamic checks run only when the sketch parses
/// cleanly and starts up; otherwise they report an error.
pub fn grade(source: SourceFile, rubric: &Rubric, student_id: &str) -> GradeReport {
    let (sketch, diags) = parse_source(source);
    let mut report = GradeReport {
        student_id: student_id.to_string(),
        assignment_id: rubric.assignment_id.clone(),
        score: 0,
        max_score: rubric.max_score,
        item_results: Vec::new(),
        feedback_lines: Vec::new(),
        fatal: None,
    };
    if sketch.is_empty() {
        report.fatal = Some(fatal_message(&diags));
        return report;
    }
    let sctx = StaticContext::new(&sketch, &diags);
    let needs_run = rubric.items.iter().any(|i| i.check.is_dynamic());
    let dctx = (needs_run && !sctx.damaged).then(|| DynamicContext::new(&sketch, &sctx.screen));
    let mut deducted = 0u32;
    for item in &rubric.items {
        let result = if !item.check.is_dynamic() {
            run_static(&sctx, item)
        } else {
            match &dctx {
                Some(d) => run_dynamic_check(d, item.check),
                None => CheckResult::error(item.check, "the sketch has syntax errors, so it could not be run"),
            }
        };
        let deduct = deducts(item, &result);
        if deduct {
            deducted = deducted.saturating_add(item.points);
        }
        let line = match result.status {
            CheckStatus::Pass => None,
            CheckStatus::Fail => Some(with_lines(&item.feedback, &result)),
            _ => {
                let text = format!("{COULD_NOT_VERIFY}{} ({})", item.feedback, result.message);
                let line = with_lines(&text, &result);
                Some(if deduct { line } else { format!("{line}{WAIVED}") })
            }
        };
        report.feedback_lines.extend(line);
        report.item_results.push(result);
    }
    report.score = rubric.max_score.saturating_sub(deducted);
    report
}

/// The plain-text report sent to the student.
pub fn render_report(report: &GradeReport) -> String {
    let mut out = format!(
        "Student: {}\nAssignment: {}\nScore: {}/{}\n",
        report.student_id, report.assignment_id, report.score, report.max_score
    );
    if let Some(f) = &report.fatal {
        out.push('\n');
        out.push_str(f);
        out.push('\n');
    }
    if !report.feedback_lines.is_empty() {
        out.push('\n');
        for line in &report.feedback_lines {
            out.push_str("- ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}
