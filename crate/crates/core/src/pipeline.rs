//! Batch grading from disk: find submissions, grade them in parallel, and
//! write one report per student plus a summary table.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::check::CheckId;
use crate::corpus;
use crate::dynamic_checks::DynamicContext;
use crate::rubric::{grade, load_rubric, render_report, GradeReport, Rubric, RubricError};
use crate::runtime::frames_to_json_lines;
use crate::sketch::parse_source;
use crate::source::SourceFile;
use crate::static_checks::detect_screen;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SOURCE_EXTENSION: &str = "pde";
/// The sole diagnostic for a rubric whose items all pass on the reference.
pub const ALL_ITEMS_PASS: &str = "all items pass";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no .pde submissions found in {0}")]
    EmptyDirectory(String),
    #[error("duplicate student ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
    #[error("submission for {student_id} not found: {path}")]
    MissingFile { student_id: String, path: String },
    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("output directory {path} is not writable: {source}")]
    Unwritable {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("grade pairs, row {row}: {message}")]
    Pairs { row: usize, message: String },
}

impl PipelineError {
    /// Whether this is a filesystem failure rather than bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, PipelineError::Io { .. } | PipelineError::Unwritable { .. })
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub student_id: String,
    pub file_path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubmissionManifest {
    /// Sorted by student id.
    pub entries: Vec<ManifestEntry>,
    /// Files that were skipped, one message each.
    pub warnings: Vec<String>,
}

fn check_id_usable(id: &str) -> Result<(), String> {
    if id.is_empty() || id == "." || id == ".." || id.contains(['/', '\\']) {
        Err(format!("`{id}` cannot be used as a report file name"))
    } else {
        Ok(())
    }
}

fn finish(mut entries: Vec<ManifestEntry>, warnings: Vec<String>) -> Result<SubmissionManifest, PipelineError> {
    entries.sort_by(|a, b| a.student_id.cmp(&b.student_id));
    let mut dups: Vec<String> = entries
        .windows(2)
        .filter(|w| w[0].student_id == w[1].student_id)
        .map(|w| w[0].student_id.clone())
        .collect();
    dups.dedup();
    if !dups.is_empty() {
        return Err(PipelineError::DuplicateIds(dups));
    }
    Ok(SubmissionManifest { entries, warnings })
}

/// Lists submissions: every `.pde` file in `dir` (the file stem is the
/// student id), or the rows of a `student_id,file_path` manifest whose
/// relative paths resolve against `dir`.
pub fn ingest(dir: &Path, manifest: Option<&Path>) -> Result<SubmissionManifest, PipelineError> {
    if let Some(m) = manifest {
        return ingest_manifest(dir, m);
    }
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for item in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = item.map_err(io_err(dir))?.path();
        let is_source = path.is_file()
            && path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case(SOURCE_EXTENSION));
        if !is_source {
            let msg = format!("skipping {}: not a .pde file", path.display());
            log::warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        entries.push(ManifestEntry {
            student_id: stem,
            file_path: path,
        });
    }
    if entries.is_empty() {
        return Err(PipelineError::EmptyDirectory(dir.display().to_string()));
    }
    warnings.sort();
    finish(entries, warnings)
}

#[derive(serde::Deserialize)]
struct ManifestRow {
    student_id: String,
    file_path: String,
}

fn ingest_manifest(dir: &Path, manifest: &Path) -> Result<SubmissionManifest, PipelineError> {
    let bad = |message: String| PipelineError::Manifest {
        path: manifest.display().to_string(),
        message,
    };
    let text = fs::read_to_string(manifest).map_err(io_err(manifest))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (i, row) in reader.deserialize::<ManifestRow>().enumerate() {
        let row = row.map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        let student_id = row.student_id.trim().to_string();
        check_id_usable(&student_id).map_err(|m| bad(format!("row {}: {m}", i + 1)))?;
        let file_path = dir.join(row.file_path.trim());
        if !file_path.is_file() {
            return Err(PipelineError::MissingFile {
                student_id,
                path: file_path.display().to_string(),
            });
        }
        entries.push(ManifestEntry { student_id, file_path });
    }
    if entries.is_empty() {
        return Err(bad("no rows".into()));
    }
    finish(entries, Vec::new())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    pub student_id: String,
    pub score: u32,
    pub fatal: bool,
    pub failed_checks: Vec<CheckId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOptions {
    /// Worker threads; 0 is treated as 1.
    pub parallelism: usize,
    /// Also write each sketch's first frames as `<id>.trace.jsonl`.
    pub trace: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            parallelism: 1,
            trace: false,
        }
    }
}

struct Graded {
    report: GradeReport,
    trace: Option<String>,
}

fn fatal_report(rubric: &Rubric, student_id: &str, message: String) -> GradeReport {
    GradeReport {
        student_id: student_id.to_string(),
        assignment_id: rubric.assignment_id.clone(),
        score: 0,
        max_score: rubric.max_score,
        item_results: Vec::new(),
        feedback_lines: Vec::new(),
        fatal: Some(message),
    }
}

/// The baseline frames the dynamic checks observe, as far as the sketch gets.
fn trace_of(source: &SourceFile) -> String {
    let (sketch, _) = parse_source(source.clone());
    let (screen, _) = detect_screen(&sketch);
    match DynamicContext::new(&sketch, &screen).baseline {
        Ok(frames) => frames_to_json_lines(&frames),
        Err(_) => String::new(),
    }
}

fn grade_entry(entry: &ManifestEntry, rubric: &Rubric, trace: bool) -> Graded {
    let id = &entry.student_id;
    let bytes = match fs::read(&entry.file_path) {
        Ok(b) => b,
        Err(e) => {
            let msg = format!("Your submission could not be read: {e}.");
            return Graded {
                report: fatal_report(rubric, id, msg),
                trace: None,
            };
        }
    };
    let source = SourceFile::from_bytes(entry.file_path.display().to_string(), &bytes);
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let trace = trace.then(|| trace_of(&source));
        (grade(source.clone(), rubric, id), trace)
    }));
    match outcome {
        Ok((report, trace)) => Graded { report, trace },
        Err(_) => {
            log::error!("grader crashed on {}", entry.file_path.display());
            let msg = "Your submission could not be graded because the grader failed on it; an instructor will grade it by hand.".to_string();
            Graded {
                report: fatal_report(rubric, id, msg),
                trace: None,
            }
        }
    }
}

fn ensure_writable(out_dir: &Path) -> Result<(), PipelineError> {
    let unwritable = |source| PipelineError::Unwritable {
        path: out_dir.display().to_string(),
        source,
    };
    fs::create_dir_all(out_dir).map_err(unwritable)?;
    let probe = out_dir.join(".pongrade-write-probe");
    fs::write(&probe, b"").map_err(unwritable)?;
    fs::remove_file(&probe).map_err(unwritable)
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(io_err(path))
}

/// Grades every submission and writes `<id>.txt` reports and the summary
/// into `out_dir`. Output bytes do not depend on `parallelism`.
pub fn grade_batch(
    manifest: &SubmissionManifest,
    rubric: &Rubric,
    out_dir: &Path,
    options: &BatchOptions,
) -> Result<Vec<SummaryRow>, PipelineError> {
    ensure_writable(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism.max(1))
        .build()
        .expect("thread pool starts");
    let graded: Vec<Graded> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|e| grade_entry(e, rubric, options.trace))
            .collect()
    });
    let mut rows = Vec::with_capacity(graded.len());
    for (entry, g) in manifest.entries.iter().zip(graded) {
        let id = &entry.student_id;
        write_file(&out_dir.join(format!("{id}.txt")), &render_report(&g.report))?;
        if let Some(t) = &g.trace {
            write_file(&out_dir.join(format!("{id}.trace.jsonl")), t)?;
        }
        rows.push(SummaryRow {
            student_id: id.clone(),
            score: g.report.score,
            fatal: g.report.fatal.is_some(),
            failed_checks: g.report.failed_checks(rubric),
        });
    }
    write_file(&out_dir.join(SUMMARY_FILE), &summary_csv(&rows))?;
    Ok(rows)
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["student_id", "score", "fatal", "failed_checks"])
        .expect("in-memory write");
    for r in rows {
        let failed: Vec<&str> = r.failed_checks.iter().map(|c| c.name()).collect();
        w.write_record([
            r.student_id.as_str(),
            &r.score.to_string(),
            &r.fatal.to_string(),
            &failed.join(";"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub student_id: String,
    pub autograd: i64,
    pub instructor: i64,
    pub abs_error: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub mean_absolute_error: f64,
}

impl Comparison {
    /// The MAE as reported: one decimal place.
    pub fn mae_text(&self) -> String {
        format!("{:.1}", self.mean_absolute_error)
    }
}

/// Compares autograder and instructor grades from CSV text with columns
/// `student_id,autograd,instructor`. Rows are numbered from 1 after the
/// header.
pub fn compare_str(text: &str) -> Result<Comparison, PipelineError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| PipelineError::Pairs {
            row: 0,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| PipelineError::Pairs {
                row: 0,
                message: format!("missing column `{name}`"),
            })
    };
    let (ci, ca, cn) = (column("student_id")?, column("autograd")?, column("instructor")?);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| PipelineError::Pairs {
            row,
            message: e.to_string(),
        })?;
        let grade = |c: usize, name: &str| -> Result<i64, PipelineError> {
            let cell = rec.get(c).unwrap_or("").trim();
            cell.parse().map_err(|_| PipelineError::Pairs {
                row,
                message: format!("{name} grade `{cell}` is not a whole number"),
            })
        };
        let (autograd, instructor) = (grade(ca, "autograd")?, grade(cn, "instructor")?);
        rows.push(ComparisonRow {
            student_id: rec.get(ci).unwrap_or("").trim().to_string(),
            autograd,
            instructor,
            abs_error: autograd.abs_diff(instructor),
        });
    }
    if rows.is_empty() {
        return Err(PipelineError::Pairs {
            row: 0,
            message: "no grade pairs".into(),
        });
    }
    let total: u64 = rows.iter().map(|r| r.abs_error).sum();
    let mean_absolute_error = total as f64 / rows.len() as f64;
    Ok(Comparison {
        rows,
        mean_absolute_error,
    })
}

pub fn compare(path: &Path) -> Result<Comparison, PipelineError> {
    compare_str(&fs::read_to_string(path).map_err(io_err(path))?)
}

/// Dry-runs a rubric against the bundled reference for its assignment and
/// lists every item the reference does not pass. Rubrics for other
/// assignments get one note and are otherwise accepted.
pub fn validate_rubric(rubric: &Rubric) -> Vec<String> {
    let Some(n) = rubric.assignment_id.builtin_number() else {
        return vec![format!(
            "no bundled reference for assignment `{}`; the rubric is well-formed but was not dry-run",
            rubric.assignment_id
        )];
    };
    let source = SourceFile::new(
        format!("assignment{n}/reference.pde"),
        corpus::reference(n).unwrap_or(""),
    );
    let report = grade(source, rubric, "reference");
    let problems: Vec<String> = rubric
        .items
        .iter()
        .zip(&report.item_results)
        .filter(|(_, r)| !r.passed())
        .map(|(item, r)| format!("{} fails on the assignment {n} reference: {}", item.check, r.message))
        .collect();
    if problems.is_empty() {
        vec![ALL_ITEMS_PASS.to_string()]
    } else {
        problems
    }
}

/// Loads a rubric file and dry-runs it; see [`validate_rubric`].
pub fn validate_rubric_file(path: &Path) -> Result<(Rubric, Vec<String>), RubricError> {
    let rubric = load_rubric(path)?;
    let diags = validate_rubric(&rubric);
    Ok((rubric, diags))
}

/// Per-check failure counts across a batch, for a quick class overview.
pub fn failure_counts(rows: &[SummaryRow]) -> BTreeMap<CheckId, usize> {
    let mut out = BTreeMap::new();
    for r in rows {
        for c in &r.failed_checks {
            *out.entry(*c).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mae_of_equal_pairs_is_zero() {
        let c = compare_str("student_id,autograd,instructor\na,5,5\nb,7,7\n").unwrap();
        assert_eq!(c.mae_text(), "0.0");
        assert!(c.rows.iter().all(|r| r.abs_error == 0));
    }

    #[test]
    fn non_numeric_grade_names_row() {
        let err = compare_str("student_id,autograd,instructor\na,5,5\nb,x,7\n").unwrap_err();
        assert!(matches!(err, PipelineError::Pairs { row: 2, .. }), "{err}");
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn columns_found_by_name() {
        let c = compare_str("instructor,student_id,autograd\n10,a,7\n").unwrap();
        assert_eq!(c.rows[0].abs_error, 3);
    }

    #[test]
    fn summary_format() {
        let rows = [
            SummaryRow {
                student_id: "ama".into(),
                score: 17,
                fatal: false,
                failed_checks: vec![CheckId::Tabs, CheckId::Strokes],
            },
            SummaryRow {
                student_id: "kofi".into(),
                score: 0,
                fatal: true,
                failed_checks: vec![],
            },
        ];
        assert_eq!(
            summary_csv(&rows),
            "student_id,score,fatal,failed_checks\nama,17,false,checkTabs;checkStrokes\nkofi,0,true,\n"
        );
        assert_eq!(failure_counts(&rows)[&CheckId::Tabs], 1);
    }

    #[test]
    fn bundled_rubrics_validate() {
        for (_, r) in crate::rubric::builtin_rubrics() {
            assert_eq!(validate_rubric(&r), [ALL_ITEMS_PASS]);
        }
    }
}
