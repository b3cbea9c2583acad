//! Constant folding over a sketch's globals and setup().

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{pure_returns_int, Num};
use crate::builtins::{named_constant, pure_numeric};
use crate::color::Rgb;
use crate::sketch::{
    AssignOp, Builtin, Diagnostic, Expr, ExprKind, IncDecOp, Sketch, Stmt, StmtKind, TypeName, UnaryOp,
};
use crate::source::Span;

use super::callgraph::{assigned_names, globals_written_from, mutable_globals};

/// Canvas of a `fullScreen()` sketch on the reference display (portrait phone).
pub const FULL_SCREEN: (f64, f64) = (1080.0, 1920.0);
/// Processing's canvas when neither `size()` nor `fullScreen()` is called.
pub const DEFAULT_SCREEN: (f64, f64) = (100.0, 100.0);

const MAX_INLINE_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenSource {
    FullScreen,
    Size,
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Screen {
    pub width: f64,
    pub height: f64,
    pub source: ScreenSource,
    pub span: Option<Span>,
}

/// Finds the canvas size. setup() is searched first, then static-mode code,
/// then every other function.
pub fn detect_screen(sketch: &Sketch) -> (Screen, Vec<Diagnostic>) {
    let mut blocks: Vec<&[Stmt]> = Vec::new();
    if let Some(setup) = sketch.function("setup") {
        blocks.push(&setup.body.stmts);
    }
    blocks.push(&sketch.top_level);
    for f in sketch.functions.iter().filter(|f| f.name != "setup") {
        blocks.push(&f.body.stmts);
    }

    let mut found: Option<&Expr> = None;
    'outer: for stmts in blocks {
        for stmt in stmts {
            let mut hit = None;
            stmt.walk(&mut |s| {
                for e in s.own_exprs() {
                    e.walk(&mut |e| {
                        if hit.is_none() {
                            if let ExprKind::Call { callee, .. } = &e.kind {
                                if callee == "fullScreen" || callee == "size" {
                                    hit = Some(e);
                                }
                            }
                        }
                    });
                }
            });
            if hit.is_some() {
                found = hit;
                break 'outer;
            }
        }
    }

    let default = |span| Screen {
        width: DEFAULT_SCREEN.0,
        height: DEFAULT_SCREEN.1,
        source: ScreenSource::Default,
        span,
    };
    let Some(call) = found else {
        let warn = Diagnostic::warning(
            "no size() or fullScreen() call; assuming a 100x100 canvas",
            Span::default(),
        );
        return (default(None), vec![warn]);
    };
    let ExprKind::Call { callee, args } = &call.kind else {
        unreachable!("only calls are recorded");
    };
    if callee == "fullScreen" {
        let screen = Screen {
            width: FULL_SCREEN.0,
            height: FULL_SCREEN.1,
            source: ScreenSource::FullScreen,
            span: Some(call.span),
        };
        return (screen, Vec::new());
    }
    let display = |name: &str| match name {
        "displayWidth" => Some(Num::int(FULL_SCREEN.0)),
        "displayHeight" => Some(Num::int(FULL_SCREEN.1)),
        _ => None,
    };
    let dims: Vec<_> = args.iter().map(|a| eval_num(a, None, &display).map(|n| n.v)).collect();
    match dims.as_slice() {
        [Some(w), Some(h), ..] if *w > 0.0 && *h > 0.0 => (
            Screen {
                width: *w,
                height: *h,
                source: ScreenSource::Size,
                span: Some(call.span),
            },
            Vec::new(),
        ),
        _ => {
            let warn = Diagnostic::warning(
                "could not evaluate the size() arguments; assuming a 100x100 canvas",
                call.span,
            );
            (default(Some(call.span)), vec![warn])
        }
    }
}

/// Evaluates `expr` with Java numeric typing. `dims` supplies `width` and
/// `height`; `lookup` resolves every other identifier.
pub(crate) fn eval_num(expr: &Expr, dims: Option<(f64, f64)>, lookup: &dyn Fn(&str) -> Option<Num>) -> Option<Num> {
    match &expr.kind {
        ExprKind::Number(v) => Some(Num::float(*v)),
        ExprKind::Int(v) => Some(Num::int(*v as f64)),
        ExprKind::Ident(name) => lookup(name).or_else(|| named_constant(name).map(Num::float)),
        ExprKind::Builtin(Builtin::Width) => dims.map(|d| Num::int(d.0)),
        ExprKind::Builtin(Builtin::Height) => dims.map(|d| Num::int(d.1)),
        ExprKind::Builtin(_) | ExprKind::Str(_) | ExprKind::Bool(_) => None,
        ExprKind::Binary { op, lhs, rhs } => {
            let a = eval_num(lhs, dims, lookup)?;
            let b = eval_num(rhs, dims, lookup)?;
            Num::binary(*op, a, b)?.ok()
        }
        ExprKind::Unary {
            op: UnaryOp::Neg,
            operand,
        } => eval_num(operand, dims, lookup).map(std::ops::Neg::neg),
        ExprKind::Unary { .. } => None,
        ExprKind::Call { callee, args } => {
            let vals = args
                .iter()
                .map(|a| eval_num(a, dims, lookup))
                .collect::<Option<Vec<_>>>()?;
            let raw: Vec<f64> = vals.iter().map(|n| n.v).collect();
            if callee == "color" {
                return Rgb::from_args(&raw).map(|c| Num::int(c.pack()));
            }
            let v = pure_numeric(callee, &raw)?.ok()?;
            Some(if pure_returns_int(callee, &vals) {
                Num::int(v)
            } else {
                Num::float(v)
            })
        }
    }
}

/// What is statically known about a sketch's globals.
#[derive(Debug, Clone)]
pub struct StaticEnv {
    pub width: f64,
    pub height: f64,
    types: BTreeMap<String, TypeName>,
    /// Values that hold for the whole run: foldable, and never written
    /// after setup.
    strict: BTreeMap<String, Option<Num>>,
    /// Values as of the end of setup, whether or not draw changes them later.
    initial: BTreeMap<String, Num>,
    mutable: BTreeSet<String>,
}

impl StaticEnv {
    /// The run-long constant value of a global, if it has one.
    pub fn binding(&self, name: &str) -> Option<f64> {
        self.strict.get(name).copied().flatten().map(|n| n.v)
    }

    /// The value of a global when the first frame starts.
    pub fn initial(&self, name: &str) -> Option<f64> {
        self.initial.get(name).map(|n| n.v)
    }

    /// All global bindings; `None` marks a global without a constant value.
    pub fn bindings(&self) -> BTreeMap<&str, Option<f64>> {
        self.strict.iter().map(|(k, v)| (k.as_str(), v.map(|n| n.v))).collect()
    }

    pub fn global_type(&self, name: &str) -> Option<TypeName> {
        self.types.get(name).copied()
    }

    /// Whether draw() or an event handler writes this global.
    pub fn is_mutable(&self, name: &str) -> bool {
        self.mutable.contains(name)
    }

    pub fn mutable_globals(&self) -> &BTreeSet<String> {
        &self.mutable
    }

    pub(crate) fn strict_num(&self, name: &str) -> Option<Num> {
        self.strict.get(name).copied().flatten()
    }

    pub(crate) fn initial_num(&self, name: &str) -> Option<Num> {
        self.initial.get(name).copied()
    }

    pub(crate) fn dims(&self) -> Option<(f64, f64)> {
        Some((self.width, self.height))
    }
}

/// Constant-folds an expression against the run-long bindings.
pub fn eval_static(expr: &Expr, env: &StaticEnv) -> Option<f64> {
    eval_num(expr, env.dims(), &|n| env.strict_num(n)).map(|n| n.v)
}

fn default_value(ty: TypeName) -> Option<Num> {
    ty.is_numeric().then(|| Num::int(0.0).coerce(ty))
}

struct Resolver<'a> {
    sketch: &'a Sketch,
    env: StaticEnv,
}

type Locals = BTreeMap<String, Option<Num>>;

impl Resolver<'_> {
    fn lookup(&self, locals: &Locals, name: &str) -> Option<Num> {
        match locals.get(name) {
            Some(v) => *v,
            None => self.env.strict_num(name),
        }
    }

    fn eval(&self, locals: &Locals, expr: &Expr) -> Option<Num> {
        eval_num(expr, self.env.dims(), &|n| self.lookup(locals, n))
    }

    fn set_global(&mut self, name: &str, value: Option<Num>) {
        let ty = self.env.types.get(name).copied();
        let value = match ty {
            Some(ty) if ty.is_numeric() => value.map(|v| v.coerce(ty)),
            _ => None,
        };
        self.env.strict.insert(name.to_string(), value);
        match value {
            Some(v) => self.env.initial.insert(name.to_string(), v),
            None => self.env.initial.remove(name),
        };
    }

    fn forget(&mut self, locals: &mut Locals, names: impl IntoIterator<Item = String>) {
        for name in names {
            if let Some(slot) = locals.get_mut(&name) {
                *slot = None;
            } else if self.env.types.contains_key(&name) {
                self.set_global(&name, None);
            }
        }
    }

    fn assign(&mut self, locals: &mut Locals, target: &str, op: AssignOp, value: Option<Num>) {
        let current = self.lookup(locals, target);
        let next = match op.binary() {
            None => value,
            Some(bin) => match (current, value) {
                (Some(a), Some(b)) => Num::binary(bin, a, b).and_then(|r| r.ok()),
                _ => None,
            },
        };
        if let Some(slot) = locals.get_mut(target) {
            // Locals keep their declared type through the stored value.
            let int = slot.is_some_and(|n| n.int);
            *slot = next.map(|n| if int { Num::int(n.v.trunc()) } else { n });
        } else if self.env.types.contains_key(target) {
            self.set_global(target, next);
        }
    }

    /// Runs straight-line code, folding what it can. Anything written under
    /// a branch or loop becomes unknown.
    fn straight_line(&mut self, stmts: &[Stmt], locals: &mut Locals, depth: usize) {
        for stmt in stmts {
            match &stmt.kind {
                StmtKind::VarDecl(d) => {
                    let v = match &d.init {
                        Some(e) => self.eval(locals, e).map(|n| n.coerce(d.type_name)),
                        None => default_value(d.type_name),
                    };
                    let v = if d.type_name.is_numeric() { v } else { None };
                    locals.insert(d.name.clone(), v);
                }
                StmtKind::Assign { target, op, value } => {
                    let v = self.eval(locals, value);
                    self.assign(locals, target, *op, v);
                }
                StmtKind::IncDec { target, op } => {
                    let one = Some(Num::int(1.0));
                    let op = match op {
                        IncDecOp::Inc => AssignOp::Add,
                        IncDecOp::Dec => AssignOp::Sub,
                    };
                    self.assign(locals, target, op, one);
                }
                StmtKind::Expr(expr) => self.call_statement(expr, locals, depth),
                StmtKind::Return(_) => return,
                StmtKind::If { .. } | StmtKind::While { .. } | StmtKind::For { .. } | StmtKind::Block(_) => {
                    let block = crate::sketch::Block {
                        stmts: vec![stmt.clone()],
                        span: stmt.span,
                        braced: false,
                    };
                    let mut names = assigned_names(&block);
                    let mut called = Vec::new();
                    block.walk_exprs(&mut |e| {
                        if let ExprKind::Call { callee, .. } = &e.kind {
                            called.push(callee.as_str());
                        }
                    });
                    names.extend(globals_written_from(self.sketch, &called));
                    self.forget(locals, names);
                }
                StmtKind::Opaque | StmtKind::Invalid => {}
            }
        }
    }

    fn call_statement(&mut self, expr: &Expr, locals: &mut Locals, depth: usize) {
        let ExprKind::Call { callee, .. } = &expr.kind else {
            return;
        };
        let Some(f) = self.sketch.function(callee) else {
            return;
        };
        if f.params.is_empty() && depth < MAX_INLINE_DEPTH {
            let mut inner = Locals::new();
            self.straight_line(&f.body.stmts, &mut inner, depth + 1);
        } else {
            let names = globals_written_from(self.sketch, &[callee]);
            self.forget(locals, names);
        }
    }
}

/// Folds globals through their initializers, static-mode code and setup().
pub fn resolve_bindings(sketch: &Sketch, screen: &Screen) -> StaticEnv {
    let mut r = Resolver {
        sketch,
        env: StaticEnv {
            width: screen.width,
            height: screen.height,
            types: BTreeMap::new(),
            strict: BTreeMap::new(),
            initial: BTreeMap::new(),
            mutable: mutable_globals(sketch),
        },
    };
    let no_locals = Locals::new();
    for g in &sketch.globals {
        r.env.types.insert(g.name.clone(), g.type_name);
        let v = match &g.init {
            Some(e) => r.eval(&no_locals, e),
            None => default_value(g.type_name),
        };
        r.set_global(&g.name, v);
    }
    let mut locals = Locals::new();
    r.straight_line(&sketch.top_level, &mut locals, 0);
    if let Some(setup) = sketch.function("setup") {
        let mut locals = Locals::new();
        r.straight_line(&setup.body.stmts, &mut locals, 0);
    }
    let mutable = r.env.mutable.clone();
    for name in mutable {
        r.env.strict.insert(name, None);
    }
    r.env
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_source;
    use crate::source::SourceFile;

    fn env_for(src: &str) -> (Sketch, StaticEnv) {
        let (sketch, _) = parse_source(SourceFile::new("t.pde", src));
        let (screen, _) = detect_screen(&sketch);
        let env = resolve_bindings(&sketch, &screen);
        (sketch, env)
    }

    fn expr(src: &str) -> Expr {
        let wrapped = format!("void f(){{ g({src}); }}");
        let (sketch, diags) = parse_source(SourceFile::new("e.pde", wrapped));
        assert!(diags.is_empty(), "{diags:?}");
        match &sketch.functions[0].body.stmts[0].kind {
            StmtKind::Expr(Expr {
                kind: ExprKind::Call { args, .. },
                ..
            }) => args[0].clone(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn width_folds_under_full_screen() {
        let (_, env) = env_for("void setup(){ fullScreen(); }");
        assert_eq!(eval_static(&expr("width/2"), &env), Some(540.0));
    }

    #[test]
    fn bound_and_unbound_identifiers() {
        let (_, env) = env_for("float x = 100; void setup(){ fullScreen(); }");
        assert_eq!(eval_static(&expr("x+20"), &env), Some(120.0));
        assert_eq!(eval_static(&expr("y*2"), &env), None);
    }

    #[test]
    fn global_initializer_sees_screen() {
        let (_, env) = env_for("float bx = width/2; void setup(){ fullScreen(); }");
        assert_eq!(env.binding("bx"), Some(540.0));
    }

    #[test]
    fn setup_assignment_binds() {
        let (_, env) = env_for("int s; void setup(){ s = 3; }");
        assert_eq!(env.binding("s"), Some(3.0));
    }

    #[test]
    fn draw_mutation_unbinds_but_keeps_initial() {
        let (_, env) = env_for("float y = 10; void setup(){} void draw(){ y = y + 1; }");
        assert_eq!(env.binding("y"), None);
        assert_eq!(env.initial("y"), Some(10.0));
        assert!(env.is_mutable("y"));
    }

    #[test]
    fn branch_in_setup_forgets() {
        let (_, env) = env_for("float y = 10; void setup(){ if (y > 3) { y = 2; } }");
        assert_eq!(env.binding("y"), None);
    }

    #[test]
    fn helper_called_from_setup_is_inlined() {
        let (_, env) = env_for("float bx; void setup(){ fullScreen(); reset(); } void reset(){ bx = width/2; }");
        assert_eq!(env.binding("bx"), Some(540.0));
    }

    #[test]
    fn int_semantics() {
        let (_, env) = env_for("int d = 25; int h = d/2; float f = d/2.0; int t = 7.9;");
        assert_eq!(env.binding("h"), Some(12.0));
        assert_eq!(env.binding("f"), Some(12.5));
        assert_eq!(env.binding("t"), Some(7.0));
    }

    #[test]
    fn division_by_zero_is_absent() {
        let (_, env) = env_for("float z = 0; float q = 5 / z;");
        assert_eq!(env.binding("q"), None);
    }

    #[test]
    fn screen_detection() {
        let (s, _) = env_for("void setup(){ size(200, 300); }");
        let (screen, diags) = detect_screen(&s);
        assert_eq!(
            (screen.width, screen.height, screen.source),
            (200.0, 300.0, ScreenSource::Size)
        );
        assert!(diags.is_empty());
        let (s, _) = env_for("void setup(){}");
        let (screen, diags) = detect_screen(&s);
        assert_eq!(screen.source, ScreenSource::Default);
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn color_folds_to_packed_int() {
        let (_, env) = env_for("color c = color(255, 0, 0); color g = 128;");
        assert_eq!(env.binding("c"), Some(Rgb([255.0, 0.0, 0.0]).pack()));
        assert_eq!(env.binding("g"), Some(128.0));
    }
}
