use super::ast::Sketch;
use super::lexer::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LineMetrics {
    /// Lines holding at least one token outside comments.
    pub code_lines: usize,
    /// Lines touched by any part of any comment.
    pub comment_bearing_lines: usize,
    /// Lines with neither tokens nor comments.
    pub blank_lines: usize,
}

/// Line tallies for a parsed sketch. A line holding both code and a
/// trailing comment counts toward both tallies.
pub fn code_line_metrics(sketch: &Sketch) -> LineMetrics {
    let source = &sketch.source;
    let lines = source.line_count();
    if lines == 0 {
        return LineMetrics::default();
    }
    let mut code = vec![false; lines];
    let mut commented = vec![false; lines];

    // The Sketch keeps comments but not tokens; re-lexing is cheap and
    // deterministic.
    for tok in tokenize(source).tokens {
        for line in tok.span.start_line..=tok.span.end_line {
            if let Some(slot) = code.get_mut(line as usize - 1) {
                *slot = true;
            }
        }
    }
    for comment in &sketch.comments {
        for line in comment.span.start_line..=comment.span.end_line {
            if let Some(slot) = commented.get_mut(line as usize - 1) {
                *slot = true;
            }
        }
    }

    let mut metrics = LineMetrics::default();
    for i in 0..lines {
        if code[i] {
            metrics.code_lines += 1;
        }
        if commented[i] {
            metrics.comment_bearing_lines += 1;
        }
        if !code[i] && !commented[i] {
            metrics.blank_lines += 1;
        }
    }
    metrics
}
