//! Lexing and parsing of Processing sketches.

pub mod ast;
pub mod diag;
pub mod lexer;
pub mod metrics;
pub mod parser;
pub mod token;

pub use ast::*;
pub use diag::{Diagnostic, Severity};
pub use lexer::{tokenize, Lexed};
pub use metrics::{code_line_metrics, LineMetrics};
pub use parser::parse;
pub use token::{Comment, CommentKind, Token, TokenKind};

use crate::source::SourceFile;

/// Tokenizes and parses a source file. Lexer diagnostics come first.
pub fn parse_source(source: SourceFile) -> (Sketch, Vec<Diagnostic>) {
    let Lexed {
        tokens,
        comments,
        mut diagnostics,
    } = tokenize(&source);
    let (sketch, parse_diags) = parse(tokens, comments, source);
    diagnostics.extend(parse_diags);
    (sketch, diagnostics)
}
