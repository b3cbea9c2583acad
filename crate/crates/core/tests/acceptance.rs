//! Acceptance suite: one PASS/FAIL line per criterion, then a non-zero exit
//! if any criterion fails. Runs without the libtest harness so the lines
//! always reach the terminal.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pongrade_core::corpus::{self, MUTANTS};
use pongrade_core::pipeline::{self, BatchOptions, ManifestEntry, SubmissionManifest};
use pongrade_core::rubric::{builtin_rubric, grade, GradeReport, Rubric};
use pongrade_core::runtime::{InputEvent, RunConfig, Runtime};
use pongrade_core::sketch::parse_source;
use pongrade_core::static_checks::{
    check_comments, check_ellipses, check_rects, detect_screen, resolve_bindings, StaticContext,
};
use pongrade_core::{CheckStatus, SourceFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const MIN_MUTANTS: [usize; 4] = [15, 8, 8, 8];
/// MAE as stated alongside each assignment's grade table.
const STATED_MAE: [&str; 4] = ["0.7", "3.5", "1.7", "1.6"];
const ORACLE_FRAMES: usize = 100;
const ORACLE_TOLERANCE: f64 = 1e-6;
const FUZZ_CASES: usize = 1000;
const FUZZ_LIMIT: Duration = Duration::from_secs(60);
const FUZZ_SEED: u64 = 0xF022;
const THROUGHPUT_LIMIT: Duration = Duration::from_secs(30);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rubric(n: u8) -> Rubric {
    builtin_rubric(n).expect("bundled rubric")
}

fn grade_text(text: &str, rubric: &Rubric, id: &str) -> GradeReport {
    grade(SourceFile::new(format!("{id}.pde"), text), rubric, id)
}

fn golden_corpus() -> Outcome {
    let mut problems = Vec::new();
    let mut slowest = Duration::ZERO;
    for n in 1..=4 {
        let r = rubric(n);
        let start = Instant::now();
        let report = grade_text(corpus::reference(n).unwrap(), &r, "reference");
        let took = start.elapsed();
        slowest = slowest.max(took);
        if report.score != 20 || !report.feedback_lines.is_empty() || report.fatal.is_some() {
            problems.push(format!(
                "assignment {n} scored {}/{} {:?}",
                report.score, report.max_score, report.feedback_lines
            ));
        }
        if took >= GOLDEN_LIMIT {
            problems.push(format!("assignment {n} took {took:?}"));
        }
    }
    let detail = if problems.is_empty() {
        format!("4 references 20/20 with no feedback; slowest {slowest:.0?}")
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn kill_matrix() -> Outcome {
    let mut problems = Vec::new();
    let mut counts = [0usize; 4];
    for m in MUTANTS {
        counts[m.assignment as usize - 1] += 1;
        let r = rubric(m.assignment);
        let target = m.target();
        let points = r.items.iter().find(|i| i.check == target).map(|i| i.points);
        let report = grade_text(m.source, &r, m.name);
        let failed = report.failed_checks(&r);
        let lost = report.max_score - report.score;
        if failed != [target] || Some(lost) != points {
            problems.push(format!(
                "A{} {}: failed {:?}, lost {lost}",
                m.assignment, m.name, failed
            ));
        }
    }
    for (i, (&have, &need)) in counts.iter().zip(&MIN_MUTANTS).enumerate() {
        if have < need {
            problems.push(format!("assignment {} has {have} mutants, needs {need}", i + 1));
        }
    }
    let detail = if problems.is_empty() {
        format!("mutants per assignment {counts:?}; each fails exactly its target item")
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

/// `code` one-statement lines, the first `commented` of them with a
/// trailing comment.
fn commented_sketch(code: usize, commented: usize) -> String {
    let mut s = String::new();
    for i in 0..code {
        s.push_str(&format!("int v{i} = {i};"));
        if i < commented {
            s.push_str(" // note");
        }
        s.push('\n');
    }
    s
}

fn comments_status(src: &str) -> CheckStatus {
    let (sketch, diags) = parse_source(SourceFile::new("c.pde", src));
    check_comments(&StaticContext::new(&sketch, &diags)).status
}

fn comment_boundary() -> Outcome {
    let at = comments_status(&commented_sketch(100, 30));
    let below = comments_status(&commented_sketch(100, 29));
    let small = comments_status(&commented_sketch(10, 3));
    let pass = at == CheckStatus::Pass && below == CheckStatus::Fail && small == CheckStatus::Pass;
    outcome(pass, format!("30/100 {at:?}, 29/100 {below:?}, 3/10 {small:?}"))
}

const OFFSET_BALL: &str = "\
float x = 520;
void setup() {
\tfullScreen();
}
void draw() {
\tellipse(x+20, 960, 20, 20);
}
";

const INLINE_DIMENSIONS: &str = "\
void setup() {
\tfullScreen();
\tint w = 30;
\tint h = 200;
\trect(0, 0, w, h);
\trect(width - w, height - h, w, h);
}
";

fn static_closure() -> Outcome {
    let run = |src: &str| {
        let (sketch, diags) = parse_source(SourceFile::new("s.pde", src));
        let ctx = StaticContext::new(&sketch, &diags);
        let (screen, _) = detect_screen(&sketch);
        let env = resolve_bindings(&sketch, &screen);
        (check_ellipses(&ctx).status, check_rects(&ctx).status, env.binding("x"))
    };
    let (ellipse, _, x) = run(OFFSET_BALL);
    let (_, rects, _) = run(INLINE_DIMENSIONS);
    let pass = ellipse == CheckStatus::Pass && rects == CheckStatus::Pass && x == Some(520.0);
    outcome(
        pass,
        format!("ellipse(x+20, ...) {ellipse:?}; inline setup dimensions {rects:?}"),
    )
}

fn mae_reproduction() -> Vec<(String, Outcome)> {
    (1..=4u8)
        .map(|n| {
            let c = pipeline::compare_str(corpus::grade_table(n).unwrap()).expect("bundled table parses");
            let stated = STATED_MAE[n as usize - 1];
            let computed = c.mae_text();
            let errors: Vec<String> = c.rows.iter().map(|r| r.abs_error.to_string()).collect();
            let detail = format!(
                "stated {stated}, recomputed from grade columns {computed} (abs errors {})",
                errors.join(",")
            );
            (
                format!("MAE, assignment {n} grade pairs"),
                outcome(computed == stated, detail),
            )
        })
        .collect()
}

/// Reflects an unbounded coordinate into `[lo, hi]` as a ball bouncing
/// elastically between two walls would.
fn fold(u: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    let t = (u - lo).rem_euclid(2.0 * span);
    if t <= span {
        lo + t
    } else {
        lo + 2.0 * span - t
    }
}

fn physics_oracle() -> Outcome {
    let (sketch, _) = parse_source(SourceFile::new("a3.pde", corpus::reference(3).unwrap()));
    let config = RunConfig::for_frames(ORACLE_FRAMES as u64);
    let mut rt = Runtime::with_config(&sketch, 1080.0, 1920.0, config).expect("reference starts");
    rt.inject(InputEvent::Press { x: 540.0, y: 960.0 }).expect("press");
    rt.inject(InputEvent::Release).expect("release");
    if let Err(e) = rt.run(ORACLE_FRAMES) {
        return outcome(false, format!("run failed: {e}"));
    }
    let mut worst = 0.0f64;
    let mut rising = 0;
    let mut last_y = None;
    for (k, frame) in rt.frames().iter().enumerate() {
        let Some(ball) = frame.calls.iter().find(|c| c.kind.name() == "ellipse") else {
            return outcome(false, format!("no ball in frame {k}"));
        };
        let kf = k as f64;
        let (ox, oy) = (540.0 + 5.0 * kf, fold(960.0 + 12.0 * kf, 25.0, 1895.0));
        worst = worst.max((ball.args[0] - ox).abs()).max((ball.args[1] - oy).abs());
        if let Some(prev) = last_y {
            rising += usize::from(oy < prev);
        }
        last_y = Some(oy);
    }
    let frames = rt.frames().len();
    // The run must include the bottom bounce, or the fold is untested.
    let pass = frames == ORACLE_FRAMES && worst <= ORACLE_TOLERANCE && rising > 0;
    outcome(
        pass,
        format!("{frames} frames, worst coordinate error {worst:e}, {rising} frames after the bottom bounce"),
    )
}

fn random_bytes(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let len = rng.gen_range(0..2048);
    (0..len).map(|_| rng.gen()).collect()
}

/// Sketches that spin, recurse or nest deeply, each otherwise plausible.
fn loop_heavy(rng: &mut ChaCha8Rng) -> String {
    let n: u32 = rng.gen_range(1..400_000);
    let depth: usize = rng.gen_range(1..300);
    let body = match rng.gen_range(0..8) {
        0 => "while (true) { }".to_string(),
        1 => format!("for (int i = 0; i < {n}; i++) {{ x = x + 1; }}"),
        2 => format!("int i = 0; while (i < {n}) {{ i++; if (i % 7 == 3) {{ continue; }} }}"),
        3 => "spin(frameCount);".to_string(),
        4 => format!(
            "for (int i = 0; i < {}; i++) {{ for (int j = 0; j < {}; j++) {{ x += j; }} }}",
            n % 2000,
            n % 700
        ),
        5 => format!("x = {}1{};", "(".repeat(depth), ")".repeat(depth)),
        6 => format!("{}x++;{}", "if (true) { ".repeat(depth), " }".repeat(depth)),
        _ => format!("x = x / (frameCount % {});", rng.gen_range(1..4)),
    };
    format!(
        "float x = 0;\nint spin(int k) {{ return spin(k + 1); }}\nvoid setup() {{ fullScreen(); }}\nvoid draw() {{\n\tellipse(x, 500, 20, 20);\n\t{body}\n}}\nvoid mousePressed() {{ {body} }}\n"
    )
}

fn well_formed(r: &GradeReport, rubric: &Rubric) -> bool {
    let fatal_ok = r.fatal.is_none() || (r.score == 0 && r.item_results.is_empty());
    let items_ok = r.fatal.is_some() || r.item_results.len() == rubric.items.len();
    r.score <= r.max_score && fatal_ok && items_ok && !pongrade_core::render_report(r).is_empty()
}

fn fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED);
    let cases: Vec<Vec<u8>> = (0..FUZZ_CASES)
        .map(|i| {
            if i % 2 == 0 {
                random_bytes(&mut rng)
            } else {
                loop_heavy(&mut rng).into_bytes()
            }
        })
        .collect();
    let rubric = rubric(4);
    let start = Instant::now();
    let mut panics = 0;
    let mut malformed = 0;
    let mut errored = 0;
    for (i, bytes) in cases.iter().enumerate() {
        let source = SourceFile::from_bytes(format!("fuzz{i}.pde"), bytes);
        match catch_unwind(AssertUnwindSafe(|| grade(source, &rubric, "fuzz"))) {
            Ok(r) => {
                malformed += usize::from(!well_formed(&r, &rubric));
                errored += usize::from(r.item_results.iter().any(|x| x.status == CheckStatus::Error));
            }
            Err(_) => panics += 1,
        }
    }
    let took = start.elapsed();
    let pass = panics == 0 && malformed == 0 && took < FUZZ_LIMIT;
    outcome(
        pass,
        format!("{FUZZ_CASES} cases in {took:.1?}: {panics} panics, {malformed} malformed reports, {errored} with a reported run error"),
    )
}

fn corpus_manifest(dir: &Path) -> SubmissionManifest {
    let mut entries = Vec::new();
    for n in 1..=4u8 {
        let mut files = vec![(format!("a{n}_reference"), corpus::reference(n).unwrap())];
        files.extend(corpus::mutants(n).map(|m| (format!("a{n}_{}", m.name), m.source)));
        for (id, text) in files {
            let path = dir.join(format!("{id}.pde"));
            fs::write(&path, text).expect("write corpus file");
            entries.push(ManifestEntry {
                student_id: id,
                file_path: path,
            });
        }
    }
    entries.sort_by(|a, b| a.student_id.cmp(&b.student_id));
    SubmissionManifest {
        entries,
        warnings: Vec::new(),
    }
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .expect("read output dir")
        .map(|e| e.expect("dir entry").path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

/// Grades the whole corpus under one rubric per assignment.
fn grade_corpus(manifest: &SubmissionManifest, out: &Path, parallelism: usize) -> Duration {
    let start = Instant::now();
    for n in 1..=4u8 {
        let prefix = format!("a{n}_");
        let part = SubmissionManifest {
            entries: manifest
                .entries
                .iter()
                .filter(|e| e.student_id.starts_with(&prefix))
                .cloned()
                .collect(),
            warnings: Vec::new(),
        };
        let options = BatchOptions {
            parallelism,
            trace: false,
        };
        pipeline::grade_batch(&part, &rubric(n), &out.join(format!("a{n}")), &options).expect("batch grades");
    }
    start.elapsed()
}

fn all_bytes(out: &Path) -> BTreeMap<String, Vec<u8>> {
    (1..=4)
        .flat_map(|n| {
            dir_bytes(&out.join(format!("a{n}")))
                .into_iter()
                .map(move |(k, v)| (format!("a{n}/{k}"), v))
        })
        .collect()
}

fn determinism_and_throughput() -> Vec<(String, Outcome)> {
    let tmp = tempfile::tempdir().expect("temp dir");
    let src = tmp.path().join("src");
    fs::create_dir(&src).unwrap();
    let manifest = corpus_manifest(&src);
    let runs = [("first", 1), ("second", 1), ("parallel", 8)];
    let mut outputs = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, p) in runs {
        let out = tmp.path().join(name);
        slowest = slowest.max(grade_corpus(&manifest, &out, p));
        outputs.push(all_bytes(&out));
    }
    let files = outputs[0].len();
    let repeat = outputs[0] == outputs[1];
    let parallel = outputs[0] == outputs[2];
    let det = outcome(
        repeat && parallel && files > manifest.entries.len(),
        format!("{files} files; repeat run identical: {repeat}; parallelism 1 vs 8 identical: {parallel}"),
    );
    let n = manifest.entries.len();
    let thr = outcome(
        slowest < THROUGHPUT_LIMIT,
        format!("{n} files graded in {slowest:.1?} at worst"),
    );
    vec![("determinism".to_string(), det), ("batch throughput".to_string(), thr)]
}

fn main() -> ExitCode {
    let mut results: Vec<(String, Outcome)> = vec![
        ("golden corpus".into(), golden_corpus()),
        ("mutant kill matrix".into(), kill_matrix()),
        ("comment-ratio boundary".into(), comment_boundary()),
        ("folded offsets and inline declarations".into(), static_closure()),
    ];
    results.extend(mae_reproduction());
    results.push(("physics oracle".into(), physics_oracle()));
    results.push(("fuzz robustness".into(), fuzz()));
    results.extend(determinism_and_throughput());

    let mut out = String::new();
    for (name, o) in &results {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        writeln!(out, "[{mark}] {name}: {}", o.detail).unwrap();
    }
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    writeln!(out, "acceptance: {} passed, {failed} failed", results.len() - failed).unwrap();
    print!("{out}");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
