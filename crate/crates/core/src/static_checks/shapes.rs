//! Drawing and canvas calls, with arguments folded where possible.

use std::collections::BTreeMap;

use crate::arith::Num;
use crate::sketch::{Expr, ExprKind, IncDecOp, Sketch, Stmt, StmtKind};
use crate::source::Span;

use super::callgraph::assigned_names;
use super::env::{eval_num, StaticEnv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Ellipse,
    Rect,
    Text,
    Background,
    Fill,
    Stroke,
    TextSize,
    FullScreen,
    Size,
}

impl ShapeKind {
    pub fn from_callee(name: &str) -> Option<ShapeKind> {
        Some(match name {
            "ellipse" => ShapeKind::Ellipse,
            "rect" => ShapeKind::Rect,
            "text" => ShapeKind::Text,
            "background" => ShapeKind::Background,
            "fill" => ShapeKind::Fill,
            "stroke" => ShapeKind::Stroke,
            "textSize" => ShapeKind::TextSize,
            "fullScreen" => ShapeKind::FullScreen,
            "size" => ShapeKind::Size,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Rect => "rect",
            ShapeKind::Text => "text",
            ShapeKind::Background => "background",
            ShapeKind::Fill => "fill",
            ShapeKind::Stroke => "stroke",
            ShapeKind::TextSize => "textSize",
            ShapeKind::FullScreen => "fullScreen",
            ShapeKind::Size => "size",
        }
    }

    /// Calls that put pixels or drawing state on the canvas.
    pub fn is_drawing(self) -> bool {
        !matches!(self, ShapeKind::FullScreen | ShapeKind::Size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeUse {
    pub kind: ShapeKind,
    /// Arguments that are constant for the whole run.
    pub args: Vec<Option<f64>>,
    /// Arguments as of the first frame, before draw() mutates anything.
    pub initial_args: Vec<Option<f64>>,
    pub arg_exprs: Vec<Expr>,
    /// `None` for static-mode code outside any function.
    pub enclosing_function: Option<String>,
    pub span: Span,
}

impl ShapeUse {
    /// All first-frame argument values, if every one is known.
    pub fn initial_values(&self) -> Option<Vec<f64>> {
        self.initial_args.iter().copied().collect()
    }
}

/// A local's value in the run-long and first-frame views.
#[derive(Debug, Clone, Copy, Default)]
struct LocalVal {
    strict: Option<Num>,
    initial: Option<Num>,
}

type Scope = BTreeMap<String, LocalVal>;

struct Collector<'a> {
    env: &'a StaticEnv,
    func: Option<String>,
    uses: Vec<ShapeUse>,
}

impl Collector<'_> {
    fn eval(&self, scope: &Scope, expr: &Expr, initial: bool) -> Option<Num> {
        let lookup = |name: &str| match scope.get(name) {
            Some(v) if initial => v.initial,
            Some(v) => v.strict,
            None if initial => self.env.initial_num(name),
            None => self.env.strict_num(name),
        };
        eval_num(expr, self.env.dims(), &lookup)
    }

    fn record_calls(&mut self, scope: &Scope, expr: &Expr) {
        expr.walk(&mut |e| {
            let ExprKind::Call { callee, args } = &e.kind else {
                return;
            };
            let Some(kind) = ShapeKind::from_callee(callee) else {
                return;
            };
            let fold = |initial| args.iter().map(|a| self.eval(scope, a, initial).map(|n| n.v)).collect();
            let shape = ShapeUse {
                kind,
                args: fold(false),
                initial_args: fold(true),
                arg_exprs: args.clone(),
                enclosing_function: self.func.clone(),
                span: e.span,
            };
            self.uses.push(shape);
        });
    }

    fn forget_assigned(scope: &mut Scope, stmts: &[Stmt]) {
        for stmt in stmts {
            let block = crate::sketch::Block {
                stmts: vec![stmt.clone()],
                span: stmt.span,
                braced: false,
            };
            for name in assigned_names(&block) {
                if let Some(v) = scope.get_mut(&name) {
                    *v = LocalVal::default();
                }
            }
        }
    }

    fn update_local(&self, scope: &mut Scope, target: &str, value: impl Fn(Option<Num>, bool) -> Option<Num>) {
        // Writes to globals are ignored: shapes are judged at the first frame.
        if let Some(cur) = scope.get(target).copied() {
            let keep_int = |n: Option<Num>, was: Option<Num>| match (n, was) {
                (Some(n), Some(w)) if w.int => Some(Num::int(n.v.trunc())),
                (n, _) => n,
            };
            let next = LocalVal {
                strict: keep_int(value(cur.strict, false), cur.strict),
                initial: keep_int(value(cur.initial, true), cur.initial),
            };
            scope.insert(target.to_string(), next);
        }
    }

    fn block(&mut self, stmts: &[Stmt], scope: &mut Scope) {
        for stmt in stmts {
            self.stmt(stmt, scope);
        }
    }

    fn stmt(&mut self, stmt: &Stmt, scope: &mut Scope) {
        match &stmt.kind {
            StmtKind::VarDecl(d) => {
                let (strict, initial) = match &d.init {
                    Some(e) => {
                        self.record_calls(scope, e);
                        (
                            self.eval(scope, e, false).map(|n| n.coerce(d.type_name)),
                            self.eval(scope, e, true).map(|n| n.coerce(d.type_name)),
                        )
                    }
                    None => (None, None),
                };
                let numeric = d.type_name.is_numeric();
                scope.insert(
                    d.name.clone(),
                    LocalVal {
                        strict: strict.filter(|_| numeric),
                        initial: initial.filter(|_| numeric),
                    },
                );
            }
            StmtKind::Assign { target, op, value } => {
                self.record_calls(scope, value);
                let strict = self.eval(scope, value, false);
                let initial = self.eval(scope, value, true);
                self.update_local(scope, target, |cur, is_initial| {
                    let rhs = if is_initial { initial } else { strict };
                    match op.binary() {
                        None => rhs,
                        Some(bin) => Num::binary(bin, cur?, rhs?)?.ok(),
                    }
                });
            }
            StmtKind::IncDec { target, op } => {
                let delta = match op {
                    IncDecOp::Inc => 1.0,
                    IncDecOp::Dec => -1.0,
                };
                self.update_local(scope, target, |cur, _| {
                    cur.map(|n| Num {
                        v: n.v + delta,
                        int: n.int,
                    })
                });
            }
            StmtKind::Expr(e) | StmtKind::Return(Some(e)) => self.record_calls(scope, e),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.record_calls(scope, cond);
                let mut inner = scope.clone();
                self.block(&then_branch.stmts, &mut inner);
                Self::forget_assigned(scope, &then_branch.stmts);
                if let Some(b) = else_branch {
                    let mut inner = scope.clone();
                    self.block(&b.stmts, &mut inner);
                    Self::forget_assigned(scope, &b.stmts);
                }
            }
            StmtKind::While { cond, body } => {
                Self::forget_assigned(scope, &body.stmts);
                self.record_calls(scope, cond);
                let mut inner = scope.clone();
                self.block(&body.stmts, &mut inner);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let mut inner = scope.clone();
                if let Some(s) = init {
                    self.stmt(s, &mut inner);
                }
                let mut loop_stmts: Vec<Stmt> = body.stmts.clone();
                loop_stmts.extend(update.iter().map(|s| (**s).clone()));
                Self::forget_assigned(&mut inner, &loop_stmts);
                if let Some(c) = cond {
                    self.record_calls(&inner, c);
                }
                self.block(&body.stmts, &mut inner);
                if let Some(s) = update {
                    self.stmt(s, &mut inner);
                }
                Self::forget_assigned(scope, &loop_stmts);
            }
            StmtKind::Block(b) => {
                let mut inner = scope.clone();
                self.block(&b.stmts, &mut inner);
                Self::forget_assigned(scope, &b.stmts);
            }
            StmtKind::Return(None) | StmtKind::Opaque | StmtKind::Invalid => {}
        }
    }
}

/// Every drawing and canvas call in the sketch, in source order.
pub fn collect_shape_uses(sketch: &Sketch, env: &StaticEnv) -> Vec<ShapeUse> {
    let mut c = Collector {
        env,
        func: None,
        uses: Vec::new(),
    };
    for g in &sketch.globals {
        if let Some(init) = &g.init {
            c.record_calls(&Scope::new(), init);
        }
    }
    c.block(&sketch.top_level, &mut Scope::new());
    for f in &sketch.functions {
        c.func = Some(f.name.clone());
        let mut scope: Scope = f.params.iter().map(|p| (p.name.clone(), LocalVal::default())).collect();
        c.block(&f.body.stmts, &mut scope);
    }
    c.uses.sort_by_key(|u| u.span.lo);
    c.uses
}

#[cfg(test)]
mod tests {
    use super::super::env::{detect_screen, resolve_bindings};
    use super::*;
    use crate::sketch::parse_source;
    use crate::source::SourceFile;

    fn uses(src: &str) -> Vec<ShapeUse> {
        let (sketch, _) = parse_source(SourceFile::new("t.pde", src));
        let (screen, _) = detect_screen(&sketch);
        let env = resolve_bindings(&sketch, &screen);
        collect_shape_uses(&sketch, &env)
    }

    #[test]
    fn static_mode_ellipse_folds() {
        let u = uses("float x = 80;\nsize(200,200);\nellipse(x+20, 100, 20, 20);");
        let e = u.iter().find(|u| u.kind == ShapeKind::Ellipse).unwrap();
        assert_eq!(e.args, vec![Some(100.0), Some(100.0), Some(20.0), Some(20.0)]);
        assert_eq!(e.enclosing_function, None);
        assert_eq!(e.span.start_line, 3);
    }

    #[test]
    fn inline_locals_fold() {
        let u = uses("void setup(){ fullScreen(); }\nvoid draw(){ float r = 25; int cx = width/2; ellipse(cx, height/2, 2*r, 2*r); }");
        let e = u.iter().find(|u| u.kind == ShapeKind::Ellipse).unwrap();
        assert_eq!(e.args, vec![Some(540.0), Some(960.0), Some(50.0), Some(50.0)]);
        assert_eq!(e.enclosing_function.as_deref(), Some("draw"));
    }

    #[test]
    fn moving_global_has_initial_value_only() {
        let u = uses(
            "float bx; void setup(){ fullScreen(); bx = width/2; }\nvoid draw(){ ellipse(bx, 10, 5, 5); bx = bx + 5; }",
        );
        let e = u.iter().find(|u| u.kind == ShapeKind::Ellipse).unwrap();
        assert_eq!(e.args[0], None);
        assert_eq!(e.initial_args[0], Some(540.0));
    }

    #[test]
    fn loop_variables_are_unknown() {
        let u = uses("void draw(){ for (int i = 0; i < 3; i++) { rect(i, 0, 5, 5); } }");
        assert_eq!(u[0].args[0], None);
        assert_eq!(u[0].args[2], Some(5.0));
    }

    #[test]
    fn source_order() {
        let u = uses("void draw(){ fill(1); rect(0,0,1,1); } void setup(){ background(0); }");
        let kinds: Vec<_> = u.iter().map(|u| u.kind).collect();
        assert_eq!(kinds, [ShapeKind::Fill, ShapeKind::Rect, ShapeKind::Background]);
    }
}
