use std::fmt;

use crate::source::Span;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// A floating-point literal.
    Number(f64),
    /// An integer literal, including `#RRGGBB` and `0x` forms.
    IntLit(i64),
    Str(String),
    // keywords
    Int,
    Float,
    Boolean,
    Color,
    StringType,
    Void,
    If,
    Else,
    While,
    For,
    Return,
    True,
    False,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Question,
    Colon,
    // operators
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    SlashAssign,
    PlusPlus,
    MinusMinus,
    /// Any character the dialect has no use for.
    Unknown(char),
}

impl TokenKind {
    pub fn keyword(word: &str) -> Option<TokenKind> {
        Some(match word {
            "int" => TokenKind::Int,
            "float" => TokenKind::Float,
            "boolean" => TokenKind::Boolean,
            "color" => TokenKind::Color,
            "String" => TokenKind::StringType,
            "void" => TokenKind::Void,
            "if" => TokenKind::If,
            "else" => TokenKind::Else,
            "while" => TokenKind::While,
            "for" => TokenKind::For,
            "return" => TokenKind::Return,
            "true" => TokenKind::True,
            "false" => TokenKind::False,
            _ => return None,
        })
    }

    pub fn is_type_keyword(&self) -> bool {
        matches!(
            self,
            TokenKind::Int | TokenKind::Float | TokenKind::Boolean | TokenKind::Color | TokenKind::StringType
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        let s = match self {
            Ident(name) => return write!(f, "identifier `{name}`"),
            Number(v) => return write!(f, "number `{v}`"),
            IntLit(v) => return write!(f, "number `{v}`"),
            Str(_) => "string literal",
            Int => "`int`",
            Float => "`float`",
            Boolean => "`boolean`",
            Color => "`color`",
            StringType => "`String`",
            Void => "`void`",
            If => "`if`",
            Else => "`else`",
            While => "`while`",
            For => "`for`",
            Return => "`return`",
            True => "`true`",
            False => "`false`",
            LParen => "`(`",
            RParen => "`)`",
            LBrace => "`{`",
            RBrace => "`}`",
            LBracket => "`[`",
            RBracket => "`]`",
            Semi => "`;`",
            Comma => "`,`",
            Dot => "`.`",
            Question => "`?`",
            Colon => "`:`",
            Plus => "`+`",
            Minus => "`-`",
            Star => "`*`",
            Slash => "`/`",
            Percent => "`%`",
            Lt => "`<`",
            Gt => "`>`",
            Le => "`<=`",
            Ge => "`>=`",
            EqEq => "`==`",
            NotEq => "`!=`",
            AndAnd => "`&&`",
            OrOr => "`||`",
            Bang => "`!`",
            Assign => "`=`",
            PlusAssign => "`+=`",
            MinusAssign => "`-=`",
            StarAssign => "`*=`",
            SlashAssign => "`/=`",
            PlusPlus => "`++`",
            MinusMinus => "`--`",
            Unknown(c) => return write!(f, "character `{c}`"),
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommentKind {
    Line,
    Block,
}

/// A source comment. `text` is the body without its delimiters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub kind: CommentKind,
    pub text: String,
    pub span: Span,
}
