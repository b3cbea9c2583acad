//! Typed syntax tree for Processing sketches.

use std::fmt;

use crate::source::{SourceFile, Span};

use super::token::Comment;

/// Processing system variables that the grader understands natively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Width,
    Height,
    MouseX,
    MouseY,
    MousePressed,
    PMouseX,
    PMouseY,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::Width,
        Builtin::Height,
        Builtin::MouseX,
        Builtin::MouseY,
        Builtin::MousePressed,
        Builtin::PMouseX,
        Builtin::PMouseY,
    ];

    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "width" => Builtin::Width,
            "height" => Builtin::Height,
            "mouseX" => Builtin::MouseX,
            "mouseY" => Builtin::MouseY,
            "mousePressed" => Builtin::MousePressed,
            "pmouseX" => Builtin::PMouseX,
            "pmouseY" => Builtin::PMouseY,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Width => "width",
            Builtin::Height => "height",
            Builtin::MouseX => "mouseX",
            Builtin::MouseY => "mouseY",
            Builtin::MousePressed => "mousePressed",
            Builtin::PMouseX => "pmouseX",
            Builtin::PMouseY => "pmouseY",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Ident(String),
    Builtin(Builtin),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Call {
        callee: String,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    /// Visits this expression and every subexpression, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    pub fn as_ident(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(name) => Some(name),
            _ => None,
        }
    }

    /// A numeric literal, possibly negated.
    pub fn as_number_literal(&self) -> Option<f64> {
        match &self.kind {
            ExprKind::Number(v) => Some(*v),
            ExprKind::Int(v) => Some(*v as f64),
            ExprKind::Unary {
                op: UnaryOp::Neg,
                operand,
            } => match operand.kind {
                ExprKind::Number(v) => Some(-v),
                ExprKind::Int(v) => Some(-(v as f64)),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeName {
    Int,
    Float,
    Boolean,
    Color,
    String,
}

impl TypeName {
    pub fn is_numeric(self) -> bool {
        matches!(self, TypeName::Int | TypeName::Float | TypeName::Color)
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeName::Int => "int",
            TypeName::Float => "float",
            TypeName::Boolean => "boolean",
            TypeName::Color => "color",
            TypeName::String => "String",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn binary(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Set => None,
            AssignOp::Add => Some(BinaryOp::Add),
            AssignOp::Sub => Some(BinaryOp::Sub),
            AssignOp::Mul => Some(BinaryOp::Mul),
            AssignOp::Div => Some(BinaryOp::Div),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncDecOp {
    Inc,
    Dec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub type_name: TypeName,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

/// A statement list. For an unbraced body (`if (c) x = 1;`) the span starts
/// at the token that introduces the body, so `span.start_line` is always the
/// line the body hangs from.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
    pub braced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl(VarDecl),
    Assign {
        target: String,
        op: AssignOp,
        value: Expr,
    },
    IncDec {
        target: String,
        op: IncDecOp,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Block,
        else_branch: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<Box<Stmt>>,
        body: Block,
    },
    Return(Option<Expr>),
    Block(Block),
    /// An unsupported construct skipped with a warning.
    Opaque,
    /// A statement that failed to parse.
    Invalid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    /// Visits this statement and all nested statements, parents first.
    /// For-loop headers are visited as ordinary children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.walk(f);
                if let Some(b) = else_branch {
                    b.walk(f);
                }
            }
            StmtKind::While { body, .. } => body.walk(f),
            StmtKind::For { init, update, body, .. } => {
                if let Some(s) = init {
                    s.walk(f);
                }
                if let Some(s) = update {
                    s.walk(f);
                }
                body.walk(f);
            }
            StmtKind::Block(b) => b.walk(f),
            _ => {}
        }
    }

    /// Expressions held directly by this statement (not by nested ones).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::VarDecl(d) => d.init.iter().collect(),
            StmtKind::Assign { value, .. } => vec![value],
            StmtKind::Expr(e) => vec![e],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::For { cond, .. } => cond.iter().collect(),
            StmtKind::Return(e) => e.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// Statements ended by their own semicolon.
    pub fn is_simple(&self) -> bool {
        matches!(
            self.kind,
            StmtKind::VarDecl(_)
                | StmtKind::Assign { .. }
                | StmtKind::IncDec { .. }
                | StmtKind::Expr(_)
                | StmtKind::Return(_)
        )
    }
}

impl Block {
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        for s in &self.stmts {
            s.walk(f);
        }
    }

    /// Every expression in the block, including nested statements.
    pub fn walk_exprs<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        self.walk(&mut |s| {
            for e in s.own_exprs() {
                e.walk(f);
            }
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub type_name: TypeName,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for `void`.
    pub return_type: Option<TypeName>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sketch {
    pub globals: Vec<VarDecl>,
    pub functions: Vec<FunctionDef>,
    /// Statements written outside any function (static-mode code).
    pub top_level: Vec<Stmt>,
    pub comments: Vec<Comment>,
    pub source: SourceFile,
}

impl Sketch {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn global(&self, name: &str) -> Option<&VarDecl> {
        self.globals.iter().find(|g| g.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.globals.is_empty() && self.functions.is_empty() && self.top_level.is_empty()
    }

    /// Name of the function whose span contains `span`, if any.
    pub fn enclosing_function(&self, span: &Span) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.span.contains(span))
    }
}
