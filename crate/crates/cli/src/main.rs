//! `pongrade`: grade a directory of Pong sketches against a rubric.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pongrade_core::pipeline::{self, BatchOptions, PipelineError};
use pongrade_core::rubric::{builtin_rubric, builtin_rubrics, load_rubric, Rubric, RubricError};

const OK: u8 = 0;
const USAGE: u8 = 1;
const IO: u8 = 2;
const FATAL_SUBMISSION: u8 = 3;

const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Parser)]
#[command(
    name = "pongrade",
    version,
    about = "Rubric-driven autograder for Processing Pong sketches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grade every submission and write one report per student.
    Grade {
        /// Rubric TOML file, or `builtin:N` for bundled assignment N.
        #[arg(long)]
        rubric: String,
        /// Directory of `.pde` files; each file stem is a student id.
        #[arg(long)]
        submissions: PathBuf,
        /// CSV with `student_id,file_path` columns; paths resolve against --submissions.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Directory for `<student_id>.txt` reports and summary.csv.
        #[arg(long, visible_alias = "mail-dir")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        parallel: u16,
        /// Also write each sketch's baseline frames as `<student_id>.trace.jsonl`.
        #[arg(long)]
        trace: bool,
    },
    /// Mean absolute error between autograder and instructor grades.
    Compare {
        /// CSV with `student_id,autograd,instructor` columns.
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Validate a rubric and dry-run it against the bundled reference.
    CheckRubric { file: PathBuf },
    /// Bundled rubrics.
    Rubrics {
        #[command(subcommand)]
        action: RubricsAction,
    },
}

#[derive(Subcommand)]
enum RubricsAction {
    /// List the bundled rubrics.
    List,
}

fn rubric_exit(e: &RubricError) -> u8 {
    match e {
        RubricError::Io { .. } => IO,
        _ => USAGE,
    }
}

fn pipeline_exit(e: &PipelineError) -> u8 {
    match e {
        PipelineError::Io { .. } | PipelineError::Unwritable { .. } | PipelineError::MissingFile { .. } => IO,
        _ => USAGE,
    }
}

fn resolve_rubric(spec: &str) -> Result<Rubric, (u8, String)> {
    if let Some(n) = spec.strip_prefix(BUILTIN_PREFIX) {
        return n
            .parse()
            .ok()
            .and_then(builtin_rubric)
            .ok_or_else(|| (USAGE, format!("no bundled rubric `{spec}`; try builtin:1 to builtin:4")));
    }
    load_rubric(Path::new(spec)).map_err(|e| (rubric_exit(&e), e.to_string()))
}

fn grade(
    rubric: &str,
    submissions: &Path,
    manifest: Option<&Path>,
    out: &Path,
    options: BatchOptions,
) -> Result<u8, (u8, String)> {
    let rubric = resolve_rubric(rubric)?;
    let fail = |e: PipelineError| (pipeline_exit(&e), e.to_string());
    let entries = pipeline::ingest(submissions, manifest).map_err(fail)?;
    for w in &entries.warnings {
        eprintln!("warning: {w}");
    }
    let rows = pipeline::grade_batch(&entries, &rubric, out, &options).map_err(fail)?;
    let fatal = rows.iter().filter(|r| r.fatal).count();
    println!(
        "graded {} submission(s) against assignment {}; reports in {}",
        rows.len(),
        rubric.assignment_id,
        out.display()
    );
    for (check, n) in pipeline::failure_counts(&rows) {
        println!("  {check}: failed by {n}");
    }
    if fatal > 0 {
        println!("{fatal} submission(s) could not be graded; see their reports");
        return Ok(FATAL_SUBMISSION);
    }
    Ok(OK)
}

fn compare(pairs: &Path) -> Result<u8, (u8, String)> {
    let c = pipeline::compare(pairs).map_err(|e| (pipeline_exit(&e), e.to_string()))?;
    println!("student_id,autograd,instructor,abs_error");
    for r in &c.rows {
        println!("{},{},{},{}", r.student_id, r.autograd, r.instructor, r.abs_error);
    }
    println!("Mean absolute error = {}", c.mae_text());
    Ok(OK)
}

fn check_rubric(file: &Path) -> Result<u8, (u8, String)> {
    let (rubric, diags) = pipeline::validate_rubric_file(file).map_err(|e| (rubric_exit(&e), e.to_string()))?;
    println!(
        "assignment {}: {} item(s), {} point(s), max score {}",
        rubric.assignment_id,
        rubric.items.len(),
        rubric.total_points(),
        rubric.max_score
    );
    for d in &diags {
        println!("{d}");
    }
    let clean =
        diags.len() == 1 && (diags[0] == pipeline::ALL_ITEMS_PASS || rubric.assignment_id.builtin_number().is_none());
    Ok(if clean { OK } else { USAGE })
}

fn list_rubrics() -> Result<u8, (u8, String)> {
    for (n, r) in builtin_rubrics() {
        println!(
            "{BUILTIN_PREFIX}{n}\t{} items\t{} points\tmax {}",
            r.items.len(),
            r.total_points(),
            r.max_score
        );
    }
    Ok(OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let result = match cli.command {
        Command::Grade {
            rubric,
            submissions,
            manifest,
            out,
            parallel,
            trace,
        } => grade(
            &rubric,
            &submissions,
            manifest.as_deref(),
            &out,
            BatchOptions {
                parallelism: parallel as usize,
                trace,
            },
        ),
        Command::Compare { pairs } => compare(&pairs),
        Command::CheckRubric { file } => check_rubric(&file),
        Command::Rubrics {
            action: RubricsAction::List,
        } => list_rubrics(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
