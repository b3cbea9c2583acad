//! Source text and location bookkeeping.

use std::fmt;

/// A source region. Byte offsets are half-open; line/column pairs are
/// 1-based, with the end position pointing just past the last character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let (first, last) = if self.lo <= other.lo {
            (self, other)
        } else {
            (other, self)
        };
        let end = if last.hi >= first.hi { last } else { first };
        Span {
            lo: first.lo,
            hi: end.hi,
            start_line: first.start_line,
            start_col: first.start_col,
            end_line: end.end_line,
            end_col: end.end_col,
        }
    }

    /// A span that only records a line, for evidence without offsets.
    pub fn at_line(line: u32) -> Span {
        Span {
            start_line: line,
            end_line: line,
            start_col: 1,
            end_col: 1,
            ..Span::default()
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

/// A student source file with a precomputed line index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub content: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, content: impl Into<String>) -> Self {
        let content = content.into();
        let mut line_starts = vec![0];
        line_starts.extend(
            content
                .bytes()
                .enumerate()
                .filter(|&(_, b)| b == b'\n')
                .map(|(i, _)| i + 1),
        );
        // A trailing newline does not open a new line.
        if line_starts.len() > 1 && *line_starts.last().unwrap() == content.len() {
            line_starts.pop();
        }
        SourceFile {
            path: path.into(),
            content,
            line_starts,
        }
    }

    /// Decodes arbitrary bytes, replacing invalid UTF-8 sequences.
    pub fn from_bytes(path: impl Into<String>, bytes: &[u8]) -> Self {
        Self::new(path, String::from_utf8_lossy(bytes).into_owned())
    }

    pub fn line_starts(&self) -> &[usize] {
        &self.line_starts
    }

    /// Number of lines; an empty file has none.
    pub fn line_count(&self) -> usize {
        if self.content.is_empty() {
            0
        } else {
            self.line_starts.len()
        }
    }

    /// 1-based line and column of a byte offset. Columns count characters.
    pub fn position(&self, offset: usize) -> (u32, u32) {
        let offset = offset.min(self.content.len());
        let line_idx = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line_idx];
        let col = self.content[start..offset].chars().count() + 1;
        (line_idx as u32 + 1, col as u32)
    }

    pub fn span(&self, lo: usize, hi: usize) -> Span {
        let (start_line, start_col) = self.position(lo);
        let (end_line, end_col) = self.position(hi);
        Span {
            lo,
            hi,
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn slice(&self, span: &Span) -> &str {
        &self.content[span.lo..span.hi]
    }

    /// Text of a 1-based line without its terminator.
    pub fn line_text(&self, line: u32) -> &str {
        let idx = line as usize - 1;
        let start = self.line_starts[idx];
        let end = self.line_starts.get(idx + 1).copied().unwrap_or(self.content.len());
        self.content[start..end].trim_end_matches(['\n', '\r'])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_index() {
        let src = SourceFile::new("a.pde", "ab\ncd\n");
        assert_eq!(src.line_starts(), &[0, 3]);
        assert_eq!(src.line_count(), 2);
        assert_eq!(src.position(4), (2, 2));
        assert_eq!(src.line_text(2), "cd");
        assert_eq!(SourceFile::new("e", "").line_count(), 0);
    }

    #[test]
    fn span_join() {
        let src = SourceFile::new("a.pde", "abc def");
        let a = src.span(0, 3);
        let b = src.span(4, 7);
        let j = a.to(b);
        assert_eq!((j.lo, j.hi), (0, 7));
        assert_eq!((j.start_col, j.end_col), (1, 8));
    }
}
