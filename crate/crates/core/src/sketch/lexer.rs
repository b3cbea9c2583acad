//! Tokenizer for the Processing dialect.
//!
//! Every byte of input ends up in exactly one token, one comment, or
//! whitespace. Lexical errors are reported as diagnostics and never stop
//! the scan.

use super::diag::Diagnostic;
use super::token::{Comment, CommentKind, Token, TokenKind};
use crate::source::SourceFile;

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn tokenize(source: &SourceFile) -> Lexed {
    Lexer {
        source,
        bytes: source.content.as_bytes(),
        pos: 0,
        out: Lexed {
            tokens: Vec::new(),
            comments: Vec::new(),
            diagnostics: Vec::new(),
        },
    }
    .run()
}

struct Lexer<'a> {
    source: &'a SourceFile,
    bytes: &'a [u8],
    pos: usize,
    out: Lexed,
}

impl<'a> Lexer<'a> {
    fn run(mut self) -> Lexed {
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let b = self.bytes[start];
            match b {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0c => self.pos += 1,
                b'/' if self.peek(1) == Some(b'/') => self.line_comment(),
                b'/' if self.peek(1) == Some(b'*') => self.block_comment(),
                b'"' => self.string(b'"'),
                b'\'' => self.string(b'\''),
                b'#' => self.hex_color(),
                b'0'..=b'9' => self.number(),
                b'.' if self.peek(1).is_some_and(|c| c.is_ascii_digit()) => self.number(),
                b'a'..=b'z' | b'A'..=b'Z' | b'_' | b'$' => self.word(),
                _ => self.punct(),
            }
        }
        self.out
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn push(&mut self, kind: TokenKind, lo: usize) {
        let span = self.source.span(lo, self.pos);
        self.out.tokens.push(Token { kind, span });
    }

    fn end_of_line(&self) -> usize {
        self.bytes[self.pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(self.bytes.len(), |i| self.pos + i)
    }

    fn line_comment(&mut self) {
        let lo = self.pos;
        let end = self.end_of_line();
        let text = self.source.content[lo + 2..end].to_string();
        self.pos = end;
        self.out.comments.push(Comment {
            kind: CommentKind::Line,
            text,
            span: self.source.span(lo, end),
        });
    }

    fn block_comment(&mut self) {
        let lo = self.pos;
        let body = lo + 2;
        match self.source.content[body..].find("*/") {
            Some(rel) => {
                let close = body + rel;
                self.pos = close + 2;
                self.out.comments.push(Comment {
                    kind: CommentKind::Block,
                    text: self.source.content[body..close].to_string(),
                    span: self.source.span(lo, self.pos),
                });
            }
            None => {
                let end = self.end_of_line();
                self.out.diagnostics.push(Diagnostic::error(
                    "unterminated block comment",
                    self.source.span(lo, end),
                ));
                self.pos = end;
                self.out.comments.push(Comment {
                    kind: CommentKind::Block,
                    text: self.source.content[body.min(end)..end].to_string(),
                    span: self.source.span(lo, end),
                });
            }
        }
    }

    fn string(&mut self, quote: u8) {
        let lo = self.pos;
        self.pos += 1;
        let mut text = String::new();
        while let Some(b) = self.peek(0) {
            if b == b'\n' {
                break;
            }
            if b == quote {
                self.pos += 1;
                self.push(TokenKind::Str(text), lo);
                return;
            }
            if b == b'\\' {
                if let Some(next) = self.peek(1) {
                    if next != b'\n' {
                        text.push(match next {
                            b'n' => '\n',
                            b't' => '\t',
                            b'r' => '\r',
                            b'0' => '\0',
                            _ => self.char_at(self.pos + 1),
                        });
                        self.pos += 1 + self.char_len(self.pos + 1);
                        continue;
                    }
                }
            }
            let c = self.char_at(self.pos);
            text.push(c);
            self.pos += c.len_utf8();
        }
        let span = self.source.span(lo, self.pos);
        self.out
            .diagnostics
            .push(Diagnostic::error("unterminated string literal", span));
        self.push(TokenKind::Str(text), lo);
    }

    fn char_at(&self, pos: usize) -> char {
        self.source.content[pos..].chars().next().unwrap_or('\0')
    }

    fn char_len(&self, pos: usize) -> usize {
        self.char_at(pos).len_utf8()
    }

    fn hex_color(&mut self) {
        let lo = self.pos;
        let digits = self.bytes[lo + 1..]
            .iter()
            .take_while(|b| b.is_ascii_hexdigit())
            .count();
        if digits == 6 {
            let text = &self.source.content[lo + 1..lo + 7];
            let rgb = u32::from_str_radix(text, 16).unwrap_or(0);
            self.pos = lo + 7;
            // Processing reads `#RRGGBB` as an opaque ARGB int.
            self.push(TokenKind::IntLit((0xFF00_0000 | rgb) as i32 as i64), lo);
        } else {
            self.pos += 1;
            self.push(TokenKind::Unknown('#'), lo);
        }
    }

    fn number(&mut self) {
        let lo = self.pos;
        if self.bytes[lo] == b'0' && matches!(self.peek(1), Some(b'x' | b'X')) {
            let digits = self.bytes[lo + 2..]
                .iter()
                .take_while(|b| b.is_ascii_hexdigit())
                .count();
            if digits > 0 {
                let text = &self.source.content[lo + 2..lo + 2 + digits];
                // Eight hex digits wrap to a negative int, as in Java.
                let value = u64::from_str_radix(text, 16).map_or(i64::MAX, |v| {
                    if v <= u32::MAX as u64 {
                        v as u32 as i32 as i64
                    } else {
                        v as i64
                    }
                });
                self.pos = lo + 2 + digits;
                self.push(TokenKind::IntLit(value), lo);
                return;
            }
        }
        self.eat_digits();
        let int_end = self.pos;
        if self.peek(0) == Some(b'.') && self.peek(1).is_none_or(|c| c.is_ascii_digit()) {
            self.pos += 1;
            self.eat_digits();
        } else if self.peek(0) == Some(b'.') && !self.peek(1).is_some_and(|c| c.is_ascii_alphabetic() || c == b'_') {
            // "5." is a valid float literal.
            self.pos += 1;
        }
        if matches!(self.peek(0), Some(b'e' | b'E')) {
            let sign = usize::from(matches!(self.peek(1), Some(b'+' | b'-')));
            if self.peek(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1 + sign;
                self.eat_digits();
            }
        }
        let text = &self.source.content[lo..self.pos];
        let value = text.parse::<f64>().unwrap_or(0.0);
        let mut integral = self.pos == int_end;
        if let Some(suffix @ (b'f' | b'F' | b'd' | b'D' | b'l' | b'L')) = self.peek(0) {
            if !self.peek(1).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                self.pos += 1;
                integral &= matches!(suffix, b'l' | b'L');
            }
        }
        if integral {
            let int = text.parse::<i64>().unwrap_or(i64::MAX);
            self.push(TokenKind::IntLit(int), lo);
        } else {
            self.push(TokenKind::Number(value), lo);
        }
    }

    fn eat_digits(&mut self) {
        while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
    }

    fn word(&mut self) {
        let lo = self.pos;
        while self
            .peek(0)
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'$')
        {
            self.pos += 1;
        }
        let word = &self.source.content[lo..self.pos];
        let kind = TokenKind::keyword(word).unwrap_or_else(|| TokenKind::Ident(word.to_string()));
        self.push(kind, lo);
    }

    fn punct(&mut self) {
        use TokenKind::*;
        let lo = self.pos;
        let two = |a: u8, b: u8| self.bytes[lo] == a && self.peek(1) == Some(b);
        let (kind, len) = if two(b'<', b'=') {
            (Le, 2)
        } else if two(b'>', b'=') {
            (Ge, 2)
        } else if two(b'=', b'=') {
            (EqEq, 2)
        } else if two(b'!', b'=') {
            (NotEq, 2)
        } else if two(b'&', b'&') {
            (AndAnd, 2)
        } else if two(b'|', b'|') {
            (OrOr, 2)
        } else if two(b'+', b'=') {
            (PlusAssign, 2)
        } else if two(b'-', b'=') {
            (MinusAssign, 2)
        } else if two(b'*', b'=') {
            (StarAssign, 2)
        } else if two(b'/', b'=') {
            (SlashAssign, 2)
        } else if two(b'+', b'+') {
            (PlusPlus, 2)
        } else if two(b'-', b'-') {
            (MinusMinus, 2)
        } else {
            let kind = match self.bytes[lo] {
                b'(' => LParen,
                b')' => RParen,
                b'{' => LBrace,
                b'}' => RBrace,
                b'[' => LBracket,
                b']' => RBracket,
                b';' => Semi,
                b',' => Comma,
                b'.' => Dot,
                b'?' => Question,
                b':' => Colon,
                b'+' => Plus,
                b'-' => Minus,
                b'*' => Star,
                b'/' => Slash,
                b'%' => Percent,
                b'<' => Lt,
                b'>' => Gt,
                b'!' => Bang,
                b'=' => Assign,
                _ => {
                    let c = self.char_at(lo);
                    self.pos += c.len_utf8();
                    self.push(Unknown(c), lo);
                    return;
                }
            };
            (kind, 1)
        };
        self.pos += len;
        self.push(kind, lo);
    }
}
