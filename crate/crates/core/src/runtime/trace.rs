use std::collections::BTreeMap;

use serde::Serialize;

use crate::color::Rgb;
use crate::source::Span;
use crate::static_checks::ShapeKind;

use super::value::Prov;

/// One recorded drawing or drawing-state call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawCall {
    #[serde(serialize_with = "ser_kind")]
    pub kind: ShapeKind,
    /// Numeric arguments; non-numeric ones are NaN.
    pub args: Vec<f64>,
    #[serde(skip)]
    pub arg_prov: Vec<Prov>,
    /// The string form of a `text()` call's first argument.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(serialize_with = "ser_rgb")]
    pub fill: Option<Rgb>,
    #[serde(serialize_with = "ser_rgb")]
    pub stroke: Option<Rgb>,
    pub line: u32,
    #[serde(skip)]
    pub span: Span,
}

fn ser_kind<S: serde::Serializer>(k: &ShapeKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(k.name())
}

fn ser_rgb<S: serde::Serializer>(c: &Option<Rgb>, s: S) -> Result<S::Ok, S::Error> {
    match c {
        Some(c) => c.0.serialize(s),
        None => s.serialize_none(),
    }
}

/// Everything observed during one draw() call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    /// Zero-based index of the frame within the run.
    pub index: usize,
    pub calls: Vec<DrawCall>,
    /// Numeric globals after draw() returned.
    pub snapshot: BTreeMap<String, f64>,
    pub mouse: (f64, f64, bool),
}

impl Frame {
    pub fn calls_of(&self, kind: ShapeKind) -> impl Iterator<Item = &DrawCall> {
        self.calls.iter().filter(move |c| c.kind == kind)
    }

    /// The `n`th call of `kind` in this frame.
    pub fn nth(&self, kind: ShapeKind, n: usize) -> Option<&DrawCall> {
        self.calls_of(kind).nth(n)
    }
}

/// Frames as JSON lines, one frame per line.
pub fn frames_to_json_lines(frames: &[Frame]) -> String {
    let mut out = String::new();
    for f in frames {
        out.push_str(&serde_json::to_string(f).expect("frames serialize"));
        out.push('\n');
    }
    out
}
