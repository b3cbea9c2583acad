//! Recursive-descent parser with statement-level error recovery.
//!
//! The parser never aborts. Malformed statements become `StmtKind::Invalid`
//! (with an error diagnostic) and unsupported constructs such as arrays,
//! classes or method calls become `StmtKind::Opaque` (with a warning).
//! Recovery resynchronizes on `;` and `}`.

use std::collections::HashSet;

use super::ast::*;
use super::diag::Diagnostic;
use super::token::{Comment, Token, TokenKind};
use crate::source::{SourceFile, Span};

const MAX_EXPR_DEPTH: usize = 96;
const MAX_BLOCK_DEPTH: usize = 48;

const MODIFIERS: &[&str] = &["public", "private", "protected", "static", "final"];
const UNSUPPORTED_WORDS: &[&str] = &[
    "new",
    "class",
    "import",
    "interface",
    "enum",
    "switch",
    "case",
    "default",
    "do",
    "break",
    "continue",
    "try",
    "catch",
    "finally",
    "throw",
    "this",
    "super",
    "null",
    "instanceof",
    "char",
    "long",
    "double",
    "byte",
    "short",
];

struct ParseError {
    message: String,
    span: Span,
    unsupported: bool,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse(tokens: Vec<Token>, comments: Vec<Comment>, source: SourceFile) -> (Sketch, Vec<Diagnostic>) {
    let mut parser = Parser {
        eof_span: source.span(source.content.len(), source.content.len()),
        tokens,
        pos: 0,
        diagnostics: Vec::new(),
        expr_depth: 0,
        block_depth: 0,
    };
    let mut globals: Vec<VarDecl> = Vec::new();
    let mut functions: Vec<FunctionDef> = Vec::new();
    let mut top_level = Vec::new();

    while !parser.at_end() {
        let before = parser.pos;
        match parser.top_level_item() {
            TopItem::Globals(decls) => {
                for decl in decls {
                    if globals.iter().any(|g| g.name == decl.name) {
                        parser.diagnostics.push(Diagnostic::error(
                            format!("global `{}` is declared more than once", decl.name),
                            decl.span,
                        ));
                    } else {
                        globals.push(decl);
                    }
                }
            }
            TopItem::Function(f) => {
                if functions.iter().any(|g| g.name == f.name) {
                    parser.diagnostics.push(Diagnostic::error(
                        format!("function `{}` is defined more than once", f.name),
                        f.span,
                    ));
                } else {
                    functions.push(f);
                }
            }
            TopItem::Stmts(stmts) => top_level.extend(
                stmts
                    .into_iter()
                    .filter(|s| !matches!(s.kind, StmtKind::Invalid | StmtKind::Opaque)),
            ),
            TopItem::Nothing => {}
        }
        if parser.pos == before {
            // A stray `}` or similar; consume it so the loop makes progress.
            let tok = parser.bump();
            parser
                .diagnostics
                .push(Diagnostic::error(format!("unexpected {}", tok.kind), tok.span));
        }
    }

    let sketch = Sketch {
        globals,
        functions,
        top_level,
        comments,
        source,
    };
    (sketch, parser.diagnostics)
}

enum TopItem {
    Globals(Vec<VarDecl>),
    Function(FunctionDef),
    Stmts(Vec<Stmt>),
    Nothing,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    eof_span: Span,
    expr_depth: usize,
    block_depth: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, ahead: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn check(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn span_here(&self) -> Span {
        self.tokens.get(self.pos).map_or(self.eof_span, |t| t.span)
    }

    fn prev_span(&self) -> Span {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map_or(self.eof_span, |t| t.span)
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        self.pos += 1;
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.check(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let span = self.span_here();
        let unsupported = matches!(
            self.peek(),
            Some(TokenKind::Dot | TokenKind::LBracket | TokenKind::Question | TokenKind::Colon)
        ) || matches!(self.peek(), Some(TokenKind::Ident(w)) if UNSUPPORTED_WORDS.contains(&w.as_str()));
        Err(ParseError {
            message: message.into(),
            span,
            unsupported,
        })
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.check(&kind) {
            Ok(self.bump().span)
        } else {
            match self.peek() {
                Some(found) => {
                    let msg = format!("expected {kind}, found {found}");
                    self.error(msg)
                }
                None => self.error(format!("expected {kind}, found end of file")),
            }
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(TokenKind::Ident(name)) if !UNSUPPORTED_WORDS.contains(&name.as_str()) => {
                let name = name.clone();
                Ok((name, self.bump().span))
            }
            Some(found) => {
                let msg = format!("expected identifier, found {found}");
                self.error(msg)
            }
            None => self.error("expected identifier, found end of file"),
        }
    }

    fn type_name(kind: &TokenKind) -> Option<TypeName> {
        Some(match kind {
            TokenKind::Int => TypeName::Int,
            TokenKind::Float => TypeName::Float,
            TokenKind::Boolean => TypeName::Boolean,
            TokenKind::Color => TypeName::Color,
            TokenKind::StringType => TypeName::String,
            _ => return None,
        })
    }

    /// Skips tokens up to and including the next `;` at nesting depth zero,
    /// or through a balanced `{ ... }` group. Stops before an unmatched `}`.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        while let Some(kind) = self.peek() {
            match kind {
                TokenKind::LParen | TokenKind::LBracket => depth += 1,
                TokenKind::RParen | TokenKind::RBracket => depth = depth.saturating_sub(1),
                TokenKind::LBrace => {
                    self.skip_balanced_braces();
                    if depth == 0 {
                        return;
                    }
                    continue;
                }
                TokenKind::RBrace => return,
                TokenKind::Semi if depth == 0 => {
                    self.pos += 1;
                    return;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn skip_balanced_braces(&mut self) {
        let mut depth = 0usize;
        while let Some(kind) = self.peek() {
            match kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += 1;
                        return;
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn recovered(&mut self, err: ParseError, start: usize) -> Stmt {
        if self.pos == start {
            self.synchronize();
        } else {
            // Resume from where the statement began so a `;` inside the
            // failing region is not mistaken for a later statement's end.
            self.pos = start;
            self.synchronize();
        }
        if self.pos == start && !self.at_end() && !self.check(&TokenKind::RBrace) {
            self.pos += 1;
        }
        let lo = self.tokens.get(start).map_or(self.eof_span, |t| t.span);
        let span = if self.pos > start {
            lo.to(self.prev_span())
        } else {
            err.span
        };
        if err.unsupported {
            self.diagnostics.push(Diagnostic::warning(
                format!("unsupported construct skipped: {}", err.message),
                span,
            ));
            Stmt {
                kind: StmtKind::Opaque,
                span,
            }
        } else {
            self.diagnostics.push(Diagnostic::error(err.message, err.span));
            Stmt {
                kind: StmtKind::Invalid,
                span,
            }
        }
    }

    // ---------------------------------------------------------------
    // top level
    // ---------------------------------------------------------------

    fn skip_modifiers(&mut self) {
        while matches!(self.peek(), Some(TokenKind::Ident(w)) if MODIFIERS.contains(&w.as_str())) {
            self.pos += 1;
        }
    }

    fn top_level_item(&mut self) -> TopItem {
        let start = self.pos;
        self.skip_modifiers();
        match self.peek() {
            Some(TokenKind::Void) => match self.function(None, start) {
                Ok(f) => TopItem::Function(f),
                Err(e) => self.skip_top_level(e, start),
            },
            Some(kind) if kind.is_type_keyword() && !matches!(self.peek_at(1), Some(TokenKind::LParen)) => {
                let ty = Self::type_name(kind).unwrap();
                let is_function = matches!(self.peek_at(1), Some(TokenKind::Ident(_)))
                    && matches!(self.peek_at(2), Some(TokenKind::LParen));
                if is_function {
                    return match self.function(Some(ty), start) {
                        Ok(f) => TopItem::Function(f),
                        Err(e) => self.skip_top_level(e, start),
                    };
                }
                self.pos += 1;
                match self.declarators(ty, start) {
                    Ok(decls) => TopItem::Globals(decls),
                    Err(e) => self.skip_top_level(e, start),
                }
            }
            Some(TokenKind::Ident(w)) if w == "import" || w == "class" || w == "interface" || w == "enum" => {
                let word = w.clone();
                let err = ParseError {
                    message: format!("`{word}` is not supported"),
                    span: self.span_here(),
                    unsupported: true,
                };
                self.skip_top_level(err, start)
            }
            Some(TokenKind::Ident(_))
                if matches!(self.peek_at(1), Some(TokenKind::Ident(_)))
                    || (matches!(self.peek_at(1), Some(TokenKind::LBracket))
                        && matches!(self.peek_at(2), Some(TokenKind::RBracket))) =>
            {
                // A declaration of an object or array type.
                let err = ParseError {
                    message: "object and array declarations are not supported".into(),
                    span: self.span_here(),
                    unsupported: true,
                };
                self.skip_top_level(err, start)
            }
            Some(_) => {
                self.pos = start;
                let mut out = Vec::new();
                self.statement_into(&mut out);
                TopItem::Stmts(out)
            }
            None => TopItem::Nothing,
        }
    }

    fn skip_top_level(&mut self, err: ParseError, start: usize) -> TopItem {
        self.recovered(err, start);
        TopItem::Nothing
    }

    fn function(&mut self, return_type: Option<TypeName>, start: usize) -> PResult<FunctionDef> {
        let lo = self.tokens[start].span;
        self.pos += 1; // return type or `void`
        let (name, _) = self.expect_ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params: Vec<Param> = Vec::new();
        if !self.check(&TokenKind::RParen) {
            loop {
                let ty = match self.peek().and_then(Self::type_name) {
                    Some(ty) => {
                        self.pos += 1;
                        ty
                    }
                    None => {
                        return Err(ParseError {
                            message:
                                "parameter types other than int, float, boolean, color and String are not supported"
                                    .into(),
                            span: self.span_here(),
                            unsupported: true,
                        })
                    }
                };
                let (pname, pspan) = self.expect_ident()?;
                if params.iter().any(|p| p.name == pname) {
                    self.diagnostics.push(Diagnostic::error(
                        format!("parameter `{pname}` is declared more than once"),
                        pspan,
                    ));
                } else {
                    params.push(Param {
                        type_name: ty,
                        name: pname,
                    });
                }
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        if !self.check(&TokenKind::LBrace) {
            return self.error("expected `{` to open the function body");
        }
        let body = self.block();
        Ok(FunctionDef {
            name,
            params,
            return_type,
            span: lo.to(body.span),
            body,
        })
    }

    /// Parses `name [= init] {, name [= init]} ;` after the type keyword.
    fn declarators(&mut self, ty: TypeName, start: usize) -> PResult<Vec<VarDecl>> {
        let lo = self.tokens[start].span;
        let mut decls = Vec::new();
        loop {
            let (name, name_span) = self.expect_ident()?;
            if self.check(&TokenKind::LBracket) {
                return Err(ParseError {
                    message: "arrays are not supported".into(),
                    span: self.span_here(),
                    unsupported: true,
                });
            }
            let init = if self.eat(&TokenKind::Assign) {
                Some(self.expr()?)
            } else {
                None
            };
            let end = init.as_ref().map_or(name_span, |e| e.span);
            let span = if decls.is_empty() {
                lo.to(end)
            } else {
                name_span.to(end)
            };
            decls.push(VarDecl {
                type_name: ty,
                name,
                init,
                span,
            });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::Semi)?;
        Ok(decls)
    }

    // ---------------------------------------------------------------
    // statements
    // ---------------------------------------------------------------

    fn block(&mut self) -> Block {
        let open = self.bump().span; // `{`
        let mut stmts = Vec::new();
        self.block_depth += 1;
        if self.block_depth > MAX_BLOCK_DEPTH {
            self.diagnostics
                .push(Diagnostic::error("blocks are nested too deeply", open));
            self.pos -= 1;
            self.skip_balanced_braces();
            self.block_depth -= 1;
            let span = open.to(self.prev_span());
            return Block {
                stmts: vec![Stmt {
                    kind: StmtKind::Invalid,
                    span,
                }],
                span,
                braced: true,
            };
        }
        loop {
            match self.peek() {
                None => {
                    self.diagnostics.push(Diagnostic::error("unclosed `{`", open));
                    break;
                }
                Some(TokenKind::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(_) => self.statement_into(&mut stmts),
            }
        }
        self.block_depth -= 1;
        Block {
            stmts,
            span: open.to(self.prev_span()),
            braced: true,
        }
    }

    /// A statement used as a loop or branch body.
    fn body(&mut self) -> Block {
        if self.check(&TokenKind::LBrace) {
            return self.block();
        }
        let intro = self.prev_span();
        let mut stmts = Vec::new();
        if !self.at_end() && !self.check(&TokenKind::RBrace) {
            self.statement_into(&mut stmts);
        }
        Block {
            span: intro.to(self.prev_span()),
            stmts,
            braced: false,
        }
    }

    fn statement_into(&mut self, out: &mut Vec<Stmt>) {
        let start = self.pos;
        match self.statement(out) {
            Ok(()) => {}
            Err(e) => {
                let stmt = self.recovered(e, start);
                out.push(stmt);
            }
        }
    }

    fn statement(&mut self, out: &mut Vec<Stmt>) -> PResult<()> {
        let start = self.pos;
        let lo = self.span_here();
        self.skip_modifiers();
        let Some(kind) = self.peek().cloned() else {
            return self.error("expected a statement");
        };
        match kind {
            TokenKind::LBrace => {
                let block = self.block();
                out.push(Stmt {
                    span: block.span,
                    kind: StmtKind::Block(block),
                });
            }
            TokenKind::Semi => {
                self.pos += 1;
            }
            TokenKind::If => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let then_branch = self.body();
                let else_branch = if self.eat(&TokenKind::Else) {
                    Some(self.body())
                } else {
                    None
                };
                let end = else_branch.as_ref().unwrap_or(&then_branch).span;
                out.push(Stmt {
                    span: lo.to(end),
                    kind: StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                });
            }
            TokenKind::While => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let body = self.body();
                out.push(Stmt {
                    span: lo.to(body.span),
                    kind: StmtKind::While { cond, body },
                });
            }
            TokenKind::For => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let init = if self.eat(&TokenKind::Semi) {
                    None
                } else {
                    let s = self.simple_statement()?;
                    if self.check(&TokenKind::Colon) {
                        return self.error("for-each loops are not supported");
                    }
                    self.expect(TokenKind::Semi)?;
                    Some(Box::new(s))
                };
                let cond = if self.check(&TokenKind::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(TokenKind::Semi)?;
                let update = if self.check(&TokenKind::RParen) {
                    None
                } else {
                    Some(Box::new(self.simple_statement()?))
                };
                self.expect(TokenKind::RParen)?;
                let body = self.body();
                out.push(Stmt {
                    span: lo.to(body.span),
                    kind: StmtKind::For {
                        init,
                        cond,
                        update,
                        body,
                    },
                });
            }
            TokenKind::Return => {
                self.pos += 1;
                let value = if self.check(&TokenKind::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                let end = self.expect(TokenKind::Semi)?;
                out.push(Stmt {
                    span: lo.to(end),
                    kind: StmtKind::Return(value),
                });
            }
            ref k if k.is_type_keyword() && !matches!(self.peek_at(1), Some(TokenKind::LParen)) => {
                let ty = Self::type_name(k).unwrap();
                self.pos += 1;
                let decls = self.declarators(ty, start)?;
                out.extend(decls.into_iter().map(|d| Stmt {
                    span: d.span,
                    kind: StmtKind::VarDecl(d),
                }));
            }
            TokenKind::Ident(ref w)
                if UNSUPPORTED_WORDS.contains(&w.as_str()) || matches!(self.peek_at(1), Some(TokenKind::Ident(_))) =>
            {
                return Err(ParseError {
                    message: format!("statement starting with `{w}` is not supported"),
                    span: lo,
                    unsupported: true,
                });
            }
            _ => {
                let stmt = self.simple_statement()?;
                let end = self.expect(TokenKind::Semi)?;
                out.push(Stmt {
                    span: stmt.span.to(end),
                    kind: stmt.kind,
                });
            }
        }
        Ok(())
    }

    /// Assignment, increment, call or single declaration, without the `;`.
    fn simple_statement(&mut self) -> PResult<Stmt> {
        let lo = self.span_here();
        if let Some(ty) = self.peek().and_then(Self::type_name) {
            if !matches!(self.peek_at(1), Some(TokenKind::LParen)) {
                self.pos += 1;
                let (name, name_span) = self.expect_ident()?;
                let init = if self.eat(&TokenKind::Assign) {
                    Some(self.expr()?)
                } else {
                    None
                };
                let span = lo.to(init.as_ref().map_or(name_span, |e| e.span));
                if self.check(&TokenKind::Comma) {
                    return self.error("multiple declarations are not supported here");
                }
                return Ok(Stmt {
                    span,
                    kind: StmtKind::VarDecl(VarDecl {
                        type_name: ty,
                        name,
                        init,
                        span,
                    }),
                });
            }
        }
        if matches!(self.peek(), Some(TokenKind::PlusPlus | TokenKind::MinusMinus)) {
            let op = if self.bump().kind == TokenKind::PlusPlus {
                IncDecOp::Inc
            } else {
                IncDecOp::Dec
            };
            let (target, span) = self.expect_ident()?;
            return Ok(Stmt {
                span: lo.to(span),
                kind: StmtKind::IncDec { target, op },
            });
        }
        if let (Some(TokenKind::Ident(name)), Some(next)) = (self.peek(), self.peek_at(1)) {
            let assign = match next {
                TokenKind::Assign => Some(AssignOp::Set),
                TokenKind::PlusAssign => Some(AssignOp::Add),
                TokenKind::MinusAssign => Some(AssignOp::Sub),
                TokenKind::StarAssign => Some(AssignOp::Mul),
                TokenKind::SlashAssign => Some(AssignOp::Div),
                _ => None,
            };
            let target = name.clone();
            if let Some(op) = assign {
                if Builtin::from_name(&target).is_some() {
                    return self.error(format!("cannot assign to system variable `{target}`"));
                }
                self.pos += 2;
                let value = self.expr()?;
                return Ok(Stmt {
                    span: lo.to(value.span),
                    kind: StmtKind::Assign { target, op, value },
                });
            }
            if matches!(next, TokenKind::PlusPlus | TokenKind::MinusMinus) {
                let op = if *next == TokenKind::PlusPlus {
                    IncDecOp::Inc
                } else {
                    IncDecOp::Dec
                };
                self.pos += 2;
                return Ok(Stmt {
                    span: lo.to(self.prev_span()),
                    kind: StmtKind::IncDec { target, op },
                });
            }
        }
        let expr = self.expr()?;
        if !matches!(expr.kind, ExprKind::Call { .. }) {
            return Err(ParseError {
                message: "not a statement".into(),
                span: expr.span,
                unsupported: matches!(
                    self.peek(),
                    Some(TokenKind::Dot | TokenKind::LBracket | TokenKind::Question)
                ),
            });
        }
        Ok(Stmt {
            span: expr.span,
            kind: StmtKind::Expr(expr),
        })
    }

    // ---------------------------------------------------------------
    // expressions
    // ---------------------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        self.expr_depth += 1;
        let result = if self.expr_depth > MAX_EXPR_DEPTH {
            self.error("expression is nested too deeply")
        } else {
            self.binary(0)
        };
        self.expr_depth -= 1;
        result
    }

    fn binary_op(kind: &TokenKind) -> Option<(BinaryOp, u8)> {
        Some(match kind {
            TokenKind::OrOr => (BinaryOp::Or, 1),
            TokenKind::AndAnd => (BinaryOp::And, 2),
            TokenKind::EqEq => (BinaryOp::Eq, 3),
            TokenKind::NotEq => (BinaryOp::Ne, 3),
            TokenKind::Lt => (BinaryOp::Lt, 4),
            TokenKind::Gt => (BinaryOp::Gt, 4),
            TokenKind::Le => (BinaryOp::Le, 4),
            TokenKind::Ge => (BinaryOp::Ge, 4),
            TokenKind::Plus => (BinaryOp::Add, 5),
            TokenKind::Minus => (BinaryOp::Sub, 5),
            TokenKind::Star => (BinaryOp::Mul, 6),
            TokenKind::Slash => (BinaryOp::Div, 6),
            TokenKind::Percent => (BinaryOp::Rem, 6),
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.peek().and_then(Self::binary_op) {
            if prec <= min_prec {
                break;
            }
            self.pos += 1;
            self.expr_depth += 1;
            if self.expr_depth > MAX_EXPR_DEPTH {
                self.expr_depth -= 1;
                return self.error("expression is nested too deeply");
            }
            let rhs = self.binary(prec);
            self.expr_depth -= 1;
            let rhs = rhs?;
            lhs = Expr {
                span: lhs.span.to(rhs.span),
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Some(TokenKind::Minus) => UnaryOp::Neg,
            Some(TokenKind::Bang) => UnaryOp::Not,
            Some(TokenKind::Plus) => {
                self.pos += 1;
                return self.unary_nested();
            }
            _ => return self.primary(),
        };
        let lo = self.bump().span;
        let operand = self.unary_nested()?;
        Ok(Expr {
            span: lo.to(operand.span),
            kind: ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
        })
    }

    fn unary_nested(&mut self) -> PResult<Expr> {
        self.expr_depth += 1;
        let r = if self.expr_depth > MAX_EXPR_DEPTH {
            self.error("expression is nested too deeply")
        } else {
            self.unary()
        };
        self.expr_depth -= 1;
        r
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(kind) = self.peek().cloned() else {
            return self.error("expected an expression, found end of file");
        };
        let lo = self.span_here();
        let expr = match kind {
            TokenKind::Number(v) => {
                self.pos += 1;
                Expr {
                    kind: ExprKind::Number(v),
                    span: lo,
                }
            }
            TokenKind::IntLit(v) => {
                self.pos += 1;
                Expr {
                    kind: ExprKind::Int(v),
                    span: lo,
                }
            }
            TokenKind::Str(s) => {
                self.pos += 1;
                Expr {
                    kind: ExprKind::Str(s),
                    span: lo,
                }
            }
            TokenKind::True | TokenKind::False => {
                self.pos += 1;
                Expr {
                    kind: ExprKind::Bool(kind == TokenKind::True),
                    span: lo,
                }
            }
            TokenKind::LParen => {
                // `(int) x` style casts become conversion calls.
                if let (Some(ty), Some(TokenKind::RParen)) =
                    (self.peek_at(1).and_then(Self::type_name), self.peek_at(2))
                {
                    if matches!(ty, TypeName::Int | TypeName::Float) {
                        self.pos += 3;
                        let operand = self.unary_nested()?;
                        return Ok(Expr {
                            span: lo.to(operand.span),
                            kind: ExprKind::Call {
                                callee: ty.to_string(),
                                args: vec![operand],
                            },
                        });
                    }
                }
                self.pos += 1;
                let inner = self.expr()?;
                let hi = self.expect(TokenKind::RParen)?;
                Expr {
                    kind: inner.kind,
                    span: lo.to(hi),
                }
            }
            ref k if k.is_type_keyword() && matches!(self.peek_at(1), Some(TokenKind::LParen)) => {
                // Processing conversion functions: int(x), float(x), color(r, g, b)...
                let callee = Self::type_name(k).unwrap().to_string();
                self.pos += 1;
                self.call(callee, lo)?
            }
            TokenKind::Ident(name) if !UNSUPPORTED_WORDS.contains(&name.as_str()) => {
                self.pos += 1;
                if self.check(&TokenKind::LParen) {
                    self.call(name, lo)?
                } else if let Some(b) = Builtin::from_name(&name) {
                    Expr {
                        kind: ExprKind::Builtin(b),
                        span: lo,
                    }
                } else {
                    Expr {
                        kind: ExprKind::Ident(name),
                        span: lo,
                    }
                }
            }
            other => return self.error(format!("expected an expression, found {other}")),
        };
        if matches!(
            self.peek(),
            Some(TokenKind::Dot | TokenKind::LBracket | TokenKind::Question)
        ) {
            return Err(ParseError {
                message: "field access, indexing and conditional expressions are not supported".into(),
                span: self.span_here(),
                unsupported: true,
            });
        }
        Ok(expr)
    }

    fn call(&mut self, callee: String, lo: Span) -> PResult<Expr> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if !self.check(&TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        let hi = self.expect(TokenKind::RParen)?;
        Ok(Expr {
            kind: ExprKind::Call { callee, args },
            span: lo.to(hi),
        })
    }
}

/// Names of every local declared or parameter in a function, for shadowing.
pub fn local_names(function: &FunctionDef) -> HashSet<&str> {
    let mut names: HashSet<&str> = function.params.iter().map(|p| p.name.as_str()).collect();
    function.body.walk(&mut |s| {
        if let StmtKind::VarDecl(d) = &s.kind {
            names.insert(&d.name);
        }
    });
    names
}
