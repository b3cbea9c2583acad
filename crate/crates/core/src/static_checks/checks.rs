//! Checks that read a sketch without running it.

use std::collections::{BTreeMap, BTreeSet};

use crate::check::{CheckId, CheckResult};
use crate::color::Rgb;
use crate::sketch::{code_line_metrics, tokenize, Block, Diagnostic, Sketch, StmtKind, TokenKind};
use crate::source::Span;

use super::callgraph::reachable;
use super::env::{detect_screen, resolve_bindings, Screen, StaticEnv};
use super::shapes::{collect_shape_uses, ShapeKind, ShapeUse};

/// Horizontal and vertical slack when matching a shape to its expected spot.
pub const POSITION_TOLERANCE: f64 = 2.0;
/// Minimum share of comment-bearing lines to code lines, as a ratio of
/// integers so the boundary is exact.
pub const COMMENT_RATIO: (usize, usize) = (3, 10);
/// Literals that never count as magic numbers.
pub const MAGIC_ALLOWLIST: [f64; 3] = [0.0, 1.0, 2.0];

pub const MSG_BACKGROUND: &str = "You may not have used the background() function";
pub const MSG_STROKE: &str = "Use at least one stroke() function";
pub const MSG_ELLIPSE: &str = "You may not have called or supplied arguments to the ellipse() function";
pub const MSG_RECT: &str = "You may not have called or supplied proper arguments to the rect() function";
pub const MSG_TEXT: &str = "You may not have called or supplied proper arguments to the text() function";
pub const MSG_FILL: &str = "You may not have called or supplied proper arguments to the fill() function";

/// Everything the static checks share for one sketch.
#[derive(Debug, Clone)]
pub struct StaticContext<'a> {
    pub sketch: &'a Sketch,
    pub screen: Screen,
    pub env: StaticEnv,
    pub uses: Vec<ShapeUse>,
    /// Whether parsing reported any error.
    pub damaged: bool,
    /// Warnings raised while resolving the canvas.
    pub warnings: Vec<Diagnostic>,
}

/// A colour known at the first frame, or not determinable statically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Paint {
    Known(Rgb),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaddlePair {
    /// Indices into [`StaticContext::uses`].
    pub left: usize,
    pub right: usize,
    /// Largest corner offset from the expected position, in pixels.
    pub error: f64,
    pub same_size: bool,
}

impl<'a> StaticContext<'a> {
    pub fn new(sketch: &'a Sketch, diagnostics: &[Diagnostic]) -> Self {
        let (screen, warnings) = detect_screen(sketch);
        let env = resolve_bindings(sketch, &screen);
        let uses = collect_shape_uses(sketch, &env);
        StaticContext {
            sketch,
            screen,
            env,
            uses,
            damaged: diagnostics.iter().any(Diagnostic::is_error),
            warnings,
        }
    }

    pub fn uses_of(&self, kind: ShapeKind) -> impl Iterator<Item = (usize, &ShapeUse)> {
        self.uses.iter().enumerate().filter(move |(_, u)| u.kind == kind)
    }

    /// The verdict when a check's target is missing: a plain failure, unless
    /// syntax errors may have hidden it.
    fn absent(&self, id: CheckId, message: &str) -> CheckResult {
        if self.damaged {
            CheckResult::error(
                id,
                format!("{message} (the sketch has syntax errors, so this could not be verified)"),
            )
        } else {
            CheckResult::fail(id, message)
        }
    }

    pub fn paint_of(&self, idx: usize) -> Paint {
        match self.uses[idx].initial_values().and_then(|v| Rgb::from_args(&v)) {
            Some(c) => Paint::Known(c),
            None => Paint::Unknown,
        }
    }

    /// The fill in effect for a shape: the latest earlier fill() in the same
    /// function, or Processing's white default.
    pub fn fill_for(&self, idx: usize) -> Paint {
        let target = &self.uses[idx];
        self.uses[..idx]
            .iter()
            .enumerate()
            .rev()
            .find(|(_, u)| u.kind == ShapeKind::Fill && u.enclosing_function == target.enclosing_function)
            .map_or(Paint::Known(Rgb::WHITE), |(i, _)| self.paint_of(i))
    }

    /// The background colour: the last background() call in source order.
    pub fn background(&self) -> Option<(usize, Paint)> {
        self.uses_of(ShapeKind::Background)
            .last()
            .map(|(i, _)| (i, self.paint_of(i)))
    }

    /// The pair of rects that best matches paddles in opposite corners.
    pub fn find_paddles(&self) -> Option<PaddlePair> {
        let (w, h) = (self.screen.width, self.screen.height);
        let rects: Vec<(usize, Vec<f64>)> = self
            .uses_of(ShapeKind::Rect)
            .filter_map(|(i, u)| u.initial_values().filter(|v| v.len() >= 4).map(|v| (i, v)))
            .collect();
        let mut best: Option<PaddlePair> = None;
        for (li, l) in &rects {
            for (ri, r) in &rects {
                if li == ri {
                    continue;
                }
                let error = [
                    l[0].abs(),
                    l[1].abs(),
                    (r[0] - (w - r[2])).abs(),
                    (r[1] - (h - r[3])).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                let cand = PaddlePair {
                    left: *li,
                    right: *ri,
                    error,
                    same_size: l[2] == r[2] && l[3] == r[3],
                };
                let better = best.is_none_or(|b| (cand.error, !cand.same_size) < (b.error, !b.same_size));
                if better {
                    best = Some(cand);
                }
            }
        }
        best
    }

    /// Paddle rects for colour comparisons, even when positions are off.
    fn paddle_indices(&self) -> Option<(usize, usize)> {
        self.find_paddles().map(|p| (p.left, p.right)).or_else(|| {
            let mut rects = self.uses_of(ShapeKind::Rect).map(|(i, _)| i);
            Some((rects.next()?, rects.next()?))
        })
    }

    /// The ellipse closest to the canvas centre, or the first ellipse.
    pub fn find_ball(&self) -> Option<usize> {
        let (cx, cy) = (self.screen.width / 2.0, self.screen.height / 2.0);
        self.uses_of(ShapeKind::Ellipse)
            .filter_map(|(i, u)| {
                let v = u.initial_values().filter(|v| v.len() >= 2)?;
                Some((i, (v[0] - cx).hypot(v[1] - cy)))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .or_else(|| self.uses_of(ShapeKind::Ellipse).map(|(i, _)| i).next())
    }
}

fn leading_ws(line: &str) -> &str {
    let end = line.find(|c: char| c != ' ' && c != '\t').unwrap_or(line.len());
    &line[..end]
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum IndentUnit {
    Tab,
    Spaces(usize),
}

struct TabWalk<'s> {
    source: &'s crate::source::SourceFile,
    unit: Option<IndentUnit>,
    offenders: BTreeSet<u32>,
}

impl TabWalk<'_> {
    fn level(&self, ws: &str) -> f64 {
        let tabs = ws.chars().filter(|c| *c == '\t').count() as f64;
        let spaces = ws.chars().filter(|c| *c == ' ').count() as f64;
        let k = match self.unit {
            Some(IndentUnit::Spaces(k)) => k as f64,
            _ => 4.0,
        };
        tabs + spaces / k
    }

    fn check_line(&mut self, line: u32, anchor: u32) {
        let ws = leading_ws(self.source.line_text(line));
        let anchor_ws = leading_ws(self.source.line_text(anchor));
        let has_tab = ws.contains('\t');
        let has_space = ws.contains(' ');
        if has_tab && has_space {
            self.offenders.insert(line);
            return;
        }
        if self.unit.is_none() && !ws.is_empty() {
            self.unit = Some(if has_tab {
                IndentUnit::Tab
            } else {
                let rel = ws.len().saturating_sub(anchor_ws.len());
                IndentUnit::Spaces(if rel > 0 { rel } else { ws.len() })
            });
        }
        let consistent = match self.unit {
            Some(IndentUnit::Tab) => !has_space,
            Some(IndentUnit::Spaces(_)) => !has_tab,
            None => true,
        };
        if !consistent || self.level(ws) + 1e-9 < self.level(anchor_ws) + 1.0 {
            self.offenders.insert(line);
        }
    }

    fn block(&mut self, block: &Block) {
        let anchor = block.span.start_line;
        for stmt in &block.stmts {
            let line = stmt.span.start_line;
            if line != anchor {
                self.check_line(line, anchor);
            }
            match &stmt.kind {
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    self.block(then_branch);
                    if let Some(b) = else_branch {
                        self.block(b);
                    }
                }
                StmtKind::While { body, .. } | StmtKind::For { body, .. } => self.block(body),
                StmtKind::Block(b) => self.block(b),
                _ => {}
            }
        }
    }
}

/// Every statement inside a body sits at least one indent unit deeper than
/// the line its body hangs from, with one unit style used throughout.
pub fn check_tabs(ctx: &StaticContext) -> CheckResult {
    let mut walk = TabWalk {
        source: &ctx.sketch.source,
        unit: None,
        offenders: BTreeSet::new(),
    };
    for f in &ctx.sketch.functions {
        walk.block(&f.body);
    }
    if walk.offenders.is_empty() {
        CheckResult::pass(CheckId::Tabs)
    } else {
        let lines: Vec<String> = walk.offenders.iter().map(u32::to_string).collect();
        CheckResult::fail(
            CheckId::Tabs,
            format!("inconsistent indentation on line(s) {}", lines.join(", ")),
        )
        .with_spans(walk.offenders.iter().map(|l| Span::at_line(*l)))
    }
}

/// No line carries two semicolon-terminated statements; semicolons inside
/// parentheses belong to for-loop headers and do not count.
pub fn check_statements_per_line(ctx: &StaticContext) -> CheckResult {
    let mut depth = 0usize;
    let mut per_line: BTreeMap<u32, usize> = BTreeMap::new();
    for tok in tokenize(&ctx.sketch.source).tokens {
        match tok.kind {
            TokenKind::LParen => depth += 1,
            TokenKind::RParen => depth = depth.saturating_sub(1),
            TokenKind::LBrace | TokenKind::RBrace => depth = 0,
            TokenKind::Semi if depth == 0 => *per_line.entry(tok.span.start_line).or_default() += 1,
            _ => {}
        }
    }
    let crowded: Vec<u32> = per_line.into_iter().filter(|(_, n)| *n >= 2).map(|(l, _)| l).collect();
    if crowded.is_empty() {
        CheckResult::pass(CheckId::StatementsPerLine)
    } else {
        let lines: Vec<String> = crowded.iter().map(u32::to_string).collect();
        CheckResult::fail(
            CheckId::StatementsPerLine,
            format!("more than one statement on line(s) {}", lines.join(", ")),
        )
        .with_spans(crowded.into_iter().map(Span::at_line))
    }
}

pub fn check_comments(ctx: &StaticContext) -> CheckResult {
    let m = code_line_metrics(ctx.sketch);
    if m.code_lines == 0 {
        return ctx.absent(CheckId::Comments, "the sketch has no code");
    }
    let (num, den) = COMMENT_RATIO;
    if den * m.comment_bearing_lines >= num * m.code_lines {
        CheckResult::pass(CheckId::Comments)
    } else {
        CheckResult::fail(
            CheckId::Comments,
            format!(
                "{} comment line(s) for {} code line(s); at least {}% is expected",
                m.comment_bearing_lines,
                m.code_lines,
                100 * num / den
            ),
        )
    }
}

pub fn check_background(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::Background;
    let Some((bi, paint)) = ctx.background() else {
        return ctx.absent(id, MSG_BACKGROUND);
    };
    let span = ctx.uses[bi].span;
    let Paint::Known(bg) = paint else {
        return CheckResult::fail(id, "the background() colour could not be determined").with_span(span);
    };
    let mut clashes = Vec::new();
    if let Some((l, r)) = ctx.paddle_indices() {
        for i in [l, r] {
            if ctx.fill_for(i) == Paint::Known(bg) {
                clashes.push(ctx.uses[i].span);
            }
        }
    }
    if let Some(b) = ctx.find_ball() {
        if ctx.fill_for(b) == Paint::Known(bg) {
            clashes.push(ctx.uses[b].span);
        }
    }
    if clashes.is_empty() {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, format!("the background colour {bg} matches a shape's fill"))
            .with_span(span)
            .with_spans(clashes)
    }
}

pub fn check_fills(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::Fills;
    if ctx.uses_of(ShapeKind::Fill).next().is_none() {
        return ctx.absent(id, MSG_FILL);
    }
    let (Some((l, r)), Some(b)) = (ctx.paddle_indices(), ctx.find_ball()) else {
        return ctx.absent(id, "fill colours need both paddles and the ball to be drawn");
    };
    let (lf, rf, bf) = (ctx.fill_for(l), ctx.fill_for(r), ctx.fill_for(b));
    let spans = [ctx.uses[l].span, ctx.uses[r].span, ctx.uses[b].span];
    let (Paint::Known(lc), Paint::Known(rc), Paint::Known(bc)) = (lf, rf, bf) else {
        return CheckResult::fail(id, "a fill() colour could not be determined").with_spans(spans);
    };
    if lc != rc {
        return CheckResult::fail(id, format!("the paddles have different fills {lc} and {rc}"))
            .with_spans([spans[0], spans[1]]);
    }
    if bc == lc {
        return CheckResult::fail(id, format!("the ball and paddles share the fill {bc}")).with_spans(spans);
    }
    if let Some((_, Paint::Known(bg))) = ctx.background() {
        if bg == bc {
            return CheckResult::fail(id, format!("the ball fill {bc} matches the background")).with_span(spans[2]);
        }
    }
    CheckResult::pass(id)
}

pub fn check_strokes(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::Strokes;
    let strokes: Vec<usize> = ctx.uses_of(ShapeKind::Stroke).map(|(i, _)| i).collect();
    if strokes.is_empty() {
        return ctx.absent(id, MSG_STROKE);
    }
    let mut colours = Vec::new();
    for &i in &strokes {
        match ctx.paint_of(i) {
            Paint::Known(c) => colours.push(c),
            Paint::Unknown => {
                return CheckResult::fail(id, "a stroke() colour could not be determined").with_span(ctx.uses[i].span)
            }
        }
    }
    if colours.windows(2).all(|w| w[0] == w[1]) {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, "stroke() is called with different colours")
            .with_spans(strokes.iter().map(|&i| ctx.uses[i].span))
    }
}

pub fn check_ellipses(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::Ellipses;
    let ellipses: Vec<&ShapeUse> = ctx.uses_of(ShapeKind::Ellipse).map(|(_, u)| u).collect();
    if ellipses.is_empty() {
        return ctx.absent(id, MSG_ELLIPSE);
    }
    let (cx, cy) = (ctx.screen.width / 2.0, ctx.screen.height / 2.0);
    let centred_circle = |u: &&ShapeUse| match u.initial_values().as_deref() {
        Some([x, y, w, h]) => (x - cx).abs() <= POSITION_TOLERANCE && (y - cy).abs() <= POSITION_TOLERANCE && w == h,
        _ => false,
    };
    if ellipses.iter().any(centred_circle) {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, MSG_ELLIPSE).with_spans(ellipses.iter().map(|u| u.span))
    }
}

pub fn check_rects(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::Rects;
    let rects: Vec<Span> = ctx.uses_of(ShapeKind::Rect).map(|(_, u)| u.span).collect();
    if rects.is_empty() {
        return ctx.absent(id, MSG_RECT);
    }
    match ctx.find_paddles() {
        Some(p) if p.error <= POSITION_TOLERANCE && p.same_size => CheckResult::pass(id),
        _ => CheckResult::fail(id, MSG_RECT).with_spans(rects),
    }
}

pub fn check_scores(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::Scores;
    let texts: Vec<&ShapeUse> = ctx.uses_of(ShapeKind::Text).map(|(_, u)| u).collect();
    if texts.is_empty() {
        return ctx.absent(id, MSG_TEXT);
    }
    let mid = ctx.screen.width / 2.0;
    let xs: Vec<f64> = texts
        .iter()
        .filter(|u| u.arg_exprs.len() >= 3)
        .filter_map(|u| u.initial_args[1])
        .collect();
    let left = xs.iter().any(|x| *x < mid);
    let right = xs.iter().any(|x| *x > mid);
    let sized = ctx.uses_of(ShapeKind::TextSize).next().is_some();
    if left && right && sized {
        CheckResult::pass(id)
    } else {
        let why = if !sized {
            "textSize() is never called"
        } else {
            "scores are not drawn on both halves of the screen"
        };
        CheckResult::fail(id, format!("{MSG_TEXT}: {why}")).with_spans(texts.iter().map(|u| u.span))
    }
}

pub fn check_setup_draw(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::SetupDraw;
    let missing: Vec<&str> = ["setup", "draw"]
        .into_iter()
        .filter(|n| ctx.sketch.function(n).is_none())
        .collect();
    if !missing.is_empty() {
        let names: Vec<String> = missing.iter().map(|n| format!("{n}()")).collect();
        return CheckResult::fail(id, format!("missing {}", names.join(" and ")));
    }
    let stray: Vec<Span> = ctx
        .uses
        .iter()
        .filter(|u| u.enclosing_function.is_none())
        .map(|u| u.span)
        .collect();
    if stray.is_empty() {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, "drawing code sits outside setup() and draw()").with_spans(stray)
    }
}

pub fn check_full_screen(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::FullScreen;
    if ctx.uses_of(ShapeKind::FullScreen).next().is_some() {
        CheckResult::pass(id)
    } else {
        let r = ctx.absent(id, "Use fullScreen() so the game fills the screen");
        match ctx.uses_of(ShapeKind::Size).next() {
            Some((_, u)) => r.with_span(u.span),
            None => r,
        }
    }
}

pub fn check_created_functions_exist(ctx: &StaticContext, names: &[String]) -> CheckResult {
    let id = CheckId::CreatedFunctionsExist;
    if names.is_empty() {
        return CheckResult::error(id, "no function names were configured for this check");
    }
    let missing: Vec<&str> = names
        .iter()
        .map(String::as_str)
        .filter(|n| ctx.sketch.function(n).is_none())
        .collect();
    if missing.is_empty() {
        CheckResult::pass(id)
    } else {
        let names: Vec<String> = missing.iter().map(|n| format!("{n}()")).collect();
        ctx.absent(id, &format!("missing function(s) {}", names.join(", ")))
    }
}

/// Literal arguments to drawing calls made while drawing frames.
pub fn check_magic_numbers(ctx: &StaticContext) -> CheckResult {
    let id = CheckId::MagicNumbers;
    if ctx.sketch.function("draw").is_none() {
        return ctx.absent(id, "there is no draw() function to inspect");
    }
    let frame_code: BTreeSet<&str> = reachable(ctx.sketch, &["draw"])
        .into_iter()
        .map(|f| f.name.as_str())
        .collect();
    let offenders: Vec<Span> = ctx
        .uses
        .iter()
        .filter(|u| u.kind.is_drawing())
        .filter(|u| u.enclosing_function.as_deref().is_some_and(|f| frame_code.contains(f)))
        .flat_map(|u| u.arg_exprs.iter())
        .filter(|e| e.as_number_literal().is_some_and(|v| !MAGIC_ALLOWLIST.contains(&v)))
        .map(|e| e.span)
        .collect();
    if offenders.is_empty() {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(
            id,
            format!(
                "{} literal drawing argument(s) should be named variables",
                offenders.len()
            ),
        )
        .with_spans(offenders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::CheckStatus;
    use crate::sketch::parse_source;
    use crate::source::SourceFile;

    fn run(src: &str, f: fn(&StaticContext) -> CheckResult) -> CheckResult {
        let (sketch, diags) = parse_source(SourceFile::new("t.pde", src));
        let ctx = StaticContext::new(&sketch, &diags);
        f(&ctx)
    }

    const PONG: &str = "void setup() {\n  fullScreen();\n  background(0);\n  stroke(255);\n}\n\
void draw() {\n  fill(255, 0, 0);\n  rect(0, 0, 30, 200);\n  rect(width - 30, height - 200, 30, 200);\n\
\x20 fill(0, 255, 0);\n  ellipse(width/2, height/2, 50, 50);\n  textSize(60);\n  text(0, width/4, 100);\n  text(0, 3*width/4, 100);\n}\n";

    #[test]
    fn reference_layout_passes_visual_checks() {
        for f in [
            check_background,
            check_fills,
            check_strokes,
            check_ellipses,
            check_rects,
            check_scores,
            check_setup_draw,
            check_full_screen,
            check_tabs,
            check_statements_per_line,
        ] {
            let r = run(PONG, f);
            assert_eq!(r.status, CheckStatus::Pass, "{r:?}");
        }
        assert_eq!(run(PONG, check_magic_numbers).status, CheckStatus::Fail);
    }

    #[test]
    fn missing_background_uses_feedback_text() {
        let r = run(
            "void setup(){ fullScreen(); } void draw(){ ellipse(1,1,1,1); }",
            check_background,
        );
        assert_eq!(r.status, CheckStatus::Fail);
        assert_eq!(r.message, MSG_BACKGROUND);
    }

    #[test]
    fn off_centre_ellipse_fails() {
        let src = PONG.replace("width/2, height/2", "width/2 + 3, height/2");
        assert_eq!(run(&src, check_ellipses).status, CheckStatus::Fail);
        let src = PONG.replace("width/2, height/2", "width/2 + 2, height/2");
        assert_eq!(run(&src, check_ellipses).status, CheckStatus::Pass);
        let src = PONG.replace("50, 50", "50, 51");
        assert_eq!(run(&src, check_ellipses).status, CheckStatus::Fail);
    }

    #[test]
    fn paddle_sizes_must_match() {
        let src = PONG.replace("rect(0, 0, 30, 200)", "rect(0, 0, 30, 199)");
        assert_eq!(run(&src, check_rects).status, CheckStatus::Fail);
    }

    #[test]
    fn same_ball_and_paddle_fill_fails() {
        let src = PONG.replace("fill(0, 255, 0);", "fill(255, 0, 0);");
        assert_eq!(run(&src, check_fills).status, CheckStatus::Fail);
    }

    #[test]
    fn background_matching_ball_fails() {
        let src = PONG.replace("background(0)", "background(0, 255, 0)");
        assert_eq!(run(&src, check_background).status, CheckStatus::Fail);
    }

    #[test]
    fn two_statements_on_a_line() {
        let r = run(
            "void draw() {\n  int a = 1; int b = 2;\n  for (int i = 0; i < 3; i++) {}\n}",
            check_statements_per_line,
        );
        assert_eq!(r.status, CheckStatus::Fail);
        assert_eq!(r.lines(), vec![2]);
    }

    #[test]
    fn indentation_rules() {
        let ok = "void draw() {\n\tif (true) {\n\t\tfoo();\n\t} else\n\t\tbar();\n}\n";
        assert_eq!(run(ok, check_tabs).status, CheckStatus::Pass);
        let flat = "void draw() {\nfoo();\n}\n";
        assert_eq!(run(flat, check_tabs).lines(), vec![2]);
        let mixed = "void draw() {\n  foo();\n \tbar();\n}\n";
        assert_eq!(run(mixed, check_tabs).lines(), vec![3]);
        let inconsistent = "void draw() {\n  foo();\n\tbar();\n}\n";
        assert_eq!(run(inconsistent, check_tabs).lines(), vec![3]);
        let same_line = "void draw() { foo(); }\n";
        assert_eq!(run(same_line, check_tabs).status, CheckStatus::Pass);
    }

    #[test]
    fn comment_ratio_boundary() {
        let body = |comments: usize, code: usize| {
            let mut s = String::new();
            for i in 0..code {
                if i < comments {
                    s.push_str("// c\n");
                }
                s.push_str(&format!("int v{i};\n"));
            }
            s
        };
        assert_eq!(run(&body(30, 100), check_comments).status, CheckStatus::Pass);
        assert_eq!(run(&body(29, 100), check_comments).status, CheckStatus::Fail);
        assert_eq!(run(&body(3, 10), check_comments).status, CheckStatus::Pass);
    }

    #[test]
    fn magic_numbers_only_in_frame_code() {
        let src = "int d = 50;\nvoid setup(){ background(40); }\nvoid draw(){ show(); ellipse(d, d, d, 1); }\nvoid show(){ rect(0, 2, 7, d); }";
        let r = run(src, check_magic_numbers);
        assert_eq!(r.status, CheckStatus::Fail);
        assert_eq!(r.lines(), vec![4]);
    }

    #[test]
    fn syntax_errors_turn_absence_into_error() {
        let r = run(
            "void setup(){ fullScreen(); }\nvoid draw(){ int x = ; }",
            check_ellipses,
        );
        assert_eq!(r.status, CheckStatus::Error);
    }

    #[test]
    fn created_functions() {
        let (sketch, diags) = parse_source(SourceFile::new("t.pde", "void displayBall(){}"));
        let ctx = StaticContext::new(&sketch, &diags);
        let names = vec!["displayBall".to_string(), "displayScores".to_string()];
        let r = check_created_functions_exist(&ctx, &names);
        assert_eq!(r.status, CheckStatus::Fail);
        assert!(r.message.contains("displayScores()"));
        assert_eq!(
            check_created_functions_exist(&ctx, &names[..1]).status,
            CheckStatus::Pass
        );
    }
}
