//! Tree-walking interpreter for the supported Processing subset.

use std::cell::Cell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{pure_returns_int, Num};
use crate::builtins::{named_constant, pure_numeric};
use crate::color::Rgb;
use crate::sketch::{
    AssignOp, BinaryOp, Block, Builtin, Expr, ExprKind, FunctionDef, IncDecOp, Sketch, Stmt, StmtKind, TypeName,
    UnaryOp,
};
use crate::source::Span;
use crate::static_checks::ShapeKind;

use super::trace::{DrawCall, Frame};
use super::value::{Prov, Tracked, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("{}", budget_message(*.limit, *.scope))]
    Budget { limit: u64, scope: BudgetScope },
    #[error("runtime error at line {line}: {message}")]
    Fault { message: String, line: u32 },
}

impl RunError {
    fn fault(message: impl Into<String>, span: Span) -> RunError {
        RunError::Fault {
            message: message.into(),
            line: span.start_line,
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

/// Which statement budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetScope {
    Frame,
    Run,
    /// An [`Allowance`] shared with other runtimes.
    Shared,
}

fn budget_message(limit: u64, scope: BudgetScope) -> String {
    match scope {
        BudgetScope::Frame => format!("the sketch ran more than {limit} statements without finishing a frame"),
        BudgetScope::Run => format!("the sketch ran more than {limit} statements in one run"),
        BudgetScope::Shared => format!("the sketch used up its allowance of {limit} statements across all runs"),
    }
}

/// A statement allowance drawn on by several runtimes in turn, bounding the
/// total work spent on one sketch.
#[derive(Debug, Clone)]
pub struct Allowance {
    left: Rc<Cell<u64>>,
    limit: u64,
}

impl Allowance {
    pub fn new(limit: u64) -> Self {
        Allowance {
            left: Rc::new(Cell::new(limit)),
            limit,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.left.get()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    /// Statements allowed per draw(), event handler, or initialisation.
    pub frame_budget: u64,
    /// Statements allowed over the runtime's whole life.
    pub run_budget: u64,
    pub max_call_depth: usize,
    /// Seed for `random()`.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            frame_budget: 200_000,
            run_budget: 5_000_000,
            max_call_depth: 64,
            seed: 0x5EED,
        }
    }
}

impl RunConfig {
    /// Budgets sized for a run of `frames` frames.
    pub fn for_frames(frames: u64) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            run_budget: frames
                .saturating_add(1)
                .saturating_mul(d.frame_budget)
                .min(d.run_budget),
            ..d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputEvent {
    Press { x: f64, y: f64 },
    Release,
    Move { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Mouse {
    x: f64,
    y: f64,
    px: f64,
    py: f64,
    pressed: bool,
}

struct Global<'s> {
    name: &'s str,
    ty: TypeName,
    value: Tracked,
}

struct Local<'s> {
    name: &'s str,
    ty: TypeName,
    value: Tracked,
}

enum Flow {
    Normal,
    Return(Option<Tracked>),
}

pub struct Runtime<'s> {
    sketch: &'s Sketch,
    functions: HashMap<&'s str, &'s FunctionDef>,
    width: f64,
    height: f64,
    globals: Vec<Global<'s>>,
    global_index: HashMap<&'s str, usize>,
    locals: Vec<Local<'s>>,
    frame_base: usize,
    depth: usize,
    mouse: Mouse,
    frame_count: i64,
    fill: Option<Rgb>,
    stroke: Option<Rgb>,
    rng: ChaCha8Rng,
    config: RunConfig,
    frame_left: u64,
    run_left: u64,
    allowance: Option<Allowance>,
    calls: Vec<DrawCall>,
    init_calls: Vec<DrawCall>,
    frames: Vec<Frame>,
}

fn default_value(ty: TypeName) -> Value {
    match ty {
        TypeName::Int | TypeName::Color => Value::Number(Num::int(0.0)),
        TypeName::Float => Value::Number(Num::float(0.0)),
        TypeName::Boolean => Value::Bool(false),
        TypeName::String => Value::Text(String::new()),
    }
}

fn coerce(ty: TypeName, t: Tracked, span: Span) -> RunResult<Tracked> {
    let value = match (ty, t.value) {
        (TypeName::Int | TypeName::Color | TypeName::Float, Value::Number(n)) => Value::Number(n.coerce(ty)),
        (TypeName::Boolean, v @ Value::Bool(_)) => v,
        (TypeName::String, v @ Value::Text(_)) => v,
        (ty, v) => {
            return Err(RunError::fault(
                format!("cannot store a {} value in a {ty} variable", v.type_name()),
                span,
            ))
        }
    };
    Ok(Tracked { value, prov: t.prov })
}

impl<'s> Runtime<'s> {
    /// Runs global initialisers, static-mode code and setup() on a canvas
    /// of the given size.
    pub fn init(sketch: &'s Sketch, width: f64, height: f64) -> RunResult<Runtime<'s>> {
        Runtime::with_config(sketch, width, height, RunConfig::default())
    }

    pub fn with_config(sketch: &'s Sketch, width: f64, height: f64, config: RunConfig) -> RunResult<Runtime<'s>> {
        Runtime::with_allowance(sketch, width, height, config, None)
    }

    /// Like [`Runtime::with_config`], also charging every statement,
    /// including initialisation, to `allowance`.
    pub fn with_allowance(
        sketch: &'s Sketch,
        width: f64,
        height: f64,
        config: RunConfig,
        allowance: Option<Allowance>,
    ) -> RunResult<Runtime<'s>> {
        let mut rt = Runtime {
            sketch,
            functions: sketch.functions.iter().map(|f| (f.name.as_str(), f)).collect(),
            width,
            height,
            globals: Vec::with_capacity(sketch.globals.len()),
            global_index: HashMap::new(),
            locals: Vec::new(),
            frame_base: 0,
            depth: 0,
            mouse: Mouse::default(),
            frame_count: 0,
            fill: Some(Rgb::WHITE),
            stroke: Some(Rgb::BLACK),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            frame_left: config.frame_budget,
            run_left: config.run_budget,
            allowance,
            calls: Vec::new(),
            init_calls: Vec::new(),
            frames: Vec::new(),
        };
        if let Some(setup) = sketch.function("setup") {
            let mut broken = None;
            setup.body.walk(&mut |s| {
                if broken.is_none() && matches!(s.kind, StmtKind::Invalid) {
                    broken = Some(s.span);
                }
            });
            if let Some(span) = broken {
                return Err(RunError::fault(
                    "setup() contains a statement that could not be parsed",
                    span,
                ));
            }
        }
        for (i, g) in sketch.globals.iter().enumerate() {
            rt.global_index.insert(&g.name, i);
            rt.globals.push(Global {
                name: &g.name,
                ty: g.type_name,
                value: Tracked {
                    value: default_value(g.type_name),
                    prov: Prov::global(i),
                },
            });
        }
        for (i, g) in sketch.globals.iter().enumerate() {
            if let Some(init) = &g.init {
                rt.tick(g.span)?;
                let v = rt.eval(init)?;
                let v = coerce(g.type_name, v, g.span)?;
                rt.globals[i].value = Tracked {
                    value: v.value,
                    prov: v.prov.union(Prov::global(i)),
                };
            }
        }
        for stmt in &sketch.top_level {
            if let Flow::Return(_) = rt.exec(stmt)? {
                break;
            }
        }
        if sketch.function("setup").is_some() {
            rt.call_user("setup", Vec::new(), Span::default())?;
        }
        rt.init_calls = std::mem::take(&mut rt.calls);
        Ok(rt)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn sketch(&self) -> &'s Sketch {
        self.sketch
    }

    /// Calls drawn during initialisation (static-mode sketches draw here).
    pub fn init_calls(&self) -> &[DrawCall] {
        &self.init_calls
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn has_function(&self, name: &str) -> bool {
        self.functions.contains_key(name)
    }

    /// Runs one draw() call and records it as a frame.
    pub fn step(&mut self) -> RunResult<&Frame> {
        self.frame_left = self.config.frame_budget;
        self.frame_count += 1;
        self.calls.clear();
        if self.has_function("draw") {
            self.call_user("draw", Vec::new(), Span::default())?;
        }
        let frame = Frame {
            index: self.frames.len(),
            calls: std::mem::take(&mut self.calls),
            snapshot: self.snapshot(),
            mouse: (self.mouse.x, self.mouse.y, self.mouse.pressed),
        };
        self.mouse.px = self.mouse.x;
        self.mouse.py = self.mouse.y;
        self.frames.push(frame);
        Ok(self.frames.last().expect("just pushed"))
    }

    /// Runs `n` frames, stopping at the first error.
    pub fn run(&mut self, n: usize) -> RunResult<()> {
        self.run_with_events(n, &[])
    }

    /// Runs `n` frames, delivering each `(frame, event)` just before that
    /// frame's draw(). Frame numbers count from the first frame of this call.
    pub fn run_with_events(&mut self, n: usize, events: &[(usize, InputEvent)]) -> RunResult<()> {
        for i in 0..n {
            for (_, ev) in events.iter().filter(|(at, _)| *at == i) {
                self.inject(*ev)?;
            }
            self.step()?;
        }
        Ok(())
    }

    /// Delivers a mouse event between frames, calling the matching handler.
    pub fn inject(&mut self, event: InputEvent) -> RunResult<()> {
        self.frame_left = self.config.frame_budget;
        let handler = match event {
            InputEvent::Press { x, y } => {
                self.mouse.x = x;
                self.mouse.y = y;
                self.mouse.pressed = true;
                "mousePressed"
            }
            InputEvent::Release => {
                self.mouse.pressed = false;
                "mouseReleased"
            }
            InputEvent::Move { x, y } => {
                self.mouse.x = x;
                self.mouse.y = y;
                if self.mouse.pressed {
                    "mouseDragged"
                } else {
                    "mouseMoved"
                }
            }
        };
        if self.has_function(handler) {
            self.call_user(handler, Vec::new(), Span::default())?;
        }
        Ok(())
    }

    /// Numeric globals by name.
    pub fn snapshot(&self) -> BTreeMap<String, f64> {
        self.globals
            .iter()
            .filter_map(|g| g.value.value.as_f64().map(|v| (g.name.to_string(), v)))
            .collect()
    }

    pub fn global(&self, name: &str) -> Option<&Value> {
        self.global_index.get(name).map(|&i| &self.globals[i].value.value)
    }

    pub fn global_number(&self, name: &str) -> Option<f64> {
        self.global(name).and_then(Value::as_f64)
    }

    pub fn global_index(&self, name: &str) -> Option<usize> {
        self.global_index.get(name).copied()
    }

    pub fn global_name(&self, index: usize) -> Option<&'s str> {
        self.globals.get(index).map(|g| g.name)
    }

    /// Names of the globals in a provenance set.
    pub fn prov_globals(&self, prov: Prov) -> Vec<&'s str> {
        prov.globals().filter_map(|i| self.global_name(i)).collect()
    }

    /// Overwrites a numeric global. Its provenance restarts as just itself.
    pub fn set_global(&mut self, name: &str, v: f64) -> RunResult<()> {
        let Some(&i) = self.global_index.get(name) else {
            return Err(self.unknown_global(name));
        };
        let g = &self.globals[i];
        let t = coerce(g.ty, Tracked::num(Num::float(v), Prov::EMPTY), Span::default())?;
        self.globals[i].value = Tracked {
            value: t.value,
            prov: Prov::global(i),
        };
        Ok(())
    }

    pub fn set_global_bool(&mut self, name: &str, v: bool) -> RunResult<()> {
        let Some(&i) = self.global_index.get(name) else {
            return Err(self.unknown_global(name));
        };
        if self.globals[i].ty != TypeName::Boolean {
            return Err(RunError::fault(format!("`{name}` is not a boolean"), Span::default()));
        }
        self.globals[i].value = Tracked {
            value: Value::Bool(v),
            prov: Prov::global(i),
        };
        Ok(())
    }

    fn unknown_global(&self, name: &str) -> RunError {
        let names: Vec<&str> = self.globals.iter().map(|g| g.name).collect();
        RunError::fault(
            format!("no global named `{name}`; globals are: {}", names.join(", ")),
            Span::default(),
        )
    }

    fn tick(&mut self, _span: Span) -> RunResult<()> {
        if self.frame_left == 0 {
            return Err(RunError::Budget {
                limit: self.config.frame_budget,
                scope: BudgetScope::Frame,
            });
        }
        if self.run_left == 0 {
            return Err(RunError::Budget {
                limit: self.config.run_budget,
                scope: BudgetScope::Run,
            });
        }
        if let Some(a) = &self.allowance {
            let left = a.left.get();
            if left == 0 {
                return Err(RunError::Budget {
                    limit: a.limit,
                    scope: BudgetScope::Shared,
                });
            }
            a.left.set(left - 1);
        }
        self.frame_left -= 1;
        self.run_left -= 1;
        Ok(())
    }

    fn call_user(&mut self, name: &str, args: Vec<Tracked>, span: Span) -> RunResult<Tracked> {
        let f = *self
            .functions
            .get(name)
            .ok_or_else(|| RunError::fault(format!("no function named `{name}`"), span))?;
        if args.len() != f.params.len() {
            return Err(RunError::fault(
                format!(
                    "{}() takes {} argument(s), {} given",
                    f.name,
                    f.params.len(),
                    args.len()
                ),
                span,
            ));
        }
        if self.depth >= self.config.max_call_depth {
            return Err(RunError::fault(
                format!(
                    "calls nested deeper than {} (runaway recursion?)",
                    self.config.max_call_depth
                ),
                span,
            ));
        }
        let saved_base = self.frame_base;
        self.frame_base = self.locals.len();
        self.depth += 1;
        let result = (|| {
            for (p, a) in f.params.iter().zip(args) {
                let value = coerce(p.type_name, a, span)?;
                self.locals.push(Local {
                    name: &p.name,
                    ty: p.type_name,
                    value,
                });
            }
            self.exec_block(&f.body)
        })();
        self.locals.truncate(self.frame_base);
        self.frame_base = saved_base;
        self.depth -= 1;
        let ret = match result? {
            Flow::Return(Some(v)) => match f.return_type {
                Some(ty) => coerce(ty, v, span)?,
                None => v,
            },
            _ => Tracked::plain(f.return_type.map_or(Value::Number(Num::int(0.0)), default_value)),
        };
        Ok(ret)
    }

    fn exec_block(&mut self, block: &'s Block) -> RunResult<Flow> {
        let mark = self.locals.len();
        let mut flow = Flow::Normal;
        for stmt in &block.stmts {
            match self.exec(stmt) {
                Ok(Flow::Normal) => {}
                Ok(ret) => {
                    flow = ret;
                    break;
                }
                Err(e) => {
                    self.locals.truncate(mark);
                    return Err(e);
                }
            }
        }
        self.locals.truncate(mark);
        Ok(flow)
    }

    fn cond(&mut self, expr: &'s Expr) -> RunResult<bool> {
        match self.eval(expr)?.value {
            Value::Bool(b) => Ok(b),
            v => Err(RunError::fault(
                format!("condition is a {}, not a boolean", v.type_name()),
                expr.span,
            )),
        }
    }

    fn exec(&mut self, stmt: &'s Stmt) -> RunResult<Flow> {
        self.tick(stmt.span)?;
        match &stmt.kind {
            StmtKind::VarDecl(d) => {
                let value = match &d.init {
                    Some(e) => {
                        let v = self.eval(e)?;
                        coerce(d.type_name, v, d.span)?
                    }
                    None => Tracked::plain(default_value(d.type_name)),
                };
                self.locals.push(Local {
                    name: &d.name,
                    ty: d.type_name,
                    value,
                });
            }
            StmtKind::Assign { target, op, value } => {
                let rhs = self.eval(value)?;
                let next = match op {
                    AssignOp::Set => rhs,
                    _ => {
                        let cur = self.read_var(target, stmt.span)?;
                        let bin = op.binary().expect("compound assignment");
                        self.binary_values(bin, cur, rhs, stmt.span)?
                    }
                };
                self.write_var(target, next, stmt.span)?;
            }
            StmtKind::IncDec { target, op } => {
                let cur = self.read_var(target, stmt.span)?;
                let bin = match op {
                    IncDecOp::Inc => BinaryOp::Add,
                    IncDecOp::Dec => BinaryOp::Sub,
                };
                let one = Tracked::num(Num::int(1.0), Prov::EMPTY);
                let next = self.binary_values(bin, cur, one, stmt.span)?;
                self.write_var(target, next, stmt.span)?;
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.cond(cond)? {
                    return self.exec_block(then_branch);
                } else if let Some(b) = else_branch {
                    return self.exec_block(b);
                }
            }
            StmtKind::While { cond, body } => loop {
                self.tick(stmt.span)?;
                if !self.cond(cond)? {
                    break;
                }
                if let Flow::Return(v) = self.exec_block(body)? {
                    return Ok(Flow::Return(v));
                }
            },
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let mark = self.locals.len();
                let result = (|| {
                    if let Some(s) = init {
                        self.exec(s)?;
                    }
                    loop {
                        self.tick(stmt.span)?;
                        if let Some(c) = cond {
                            if !self.cond(c)? {
                                break;
                            }
                        }
                        if let Flow::Return(v) = self.exec_block(body)? {
                            return Ok(Flow::Return(v));
                        }
                        if let Some(s) = update {
                            self.exec(s)?;
                        }
                    }
                    Ok(Flow::Normal)
                })();
                self.locals.truncate(mark);
                return result;
            }
            StmtKind::Return(e) => {
                let v = e.as_ref().map(|e| self.eval(e)).transpose()?;
                return Ok(Flow::Return(v));
            }
            StmtKind::Block(b) => return self.exec_block(b),
            StmtKind::Opaque => {}
            StmtKind::Invalid => {
                return Err(RunError::fault("this statement could not be parsed", stmt.span));
            }
        }
        Ok(Flow::Normal)
    }

    fn find_local(&self, name: &str) -> Option<usize> {
        (self.frame_base..self.locals.len())
            .rev()
            .find(|&i| self.locals[i].name == name)
    }

    fn read_var(&self, name: &str, span: Span) -> RunResult<Tracked> {
        if let Some(i) = self.find_local(name) {
            return Ok(self.locals[i].value.clone());
        }
        if let Some(&i) = self.global_index.get(name) {
            let g = &self.globals[i].value;
            return Ok(Tracked {
                value: g.value.clone(),
                prov: g.prov.union(Prov::global(i)),
            });
        }
        let n = match name {
            "frameCount" => Num::int(self.frame_count as f64),
            "displayWidth" => Num::int(crate::static_checks::env::FULL_SCREEN.0),
            "displayHeight" => Num::int(crate::static_checks::env::FULL_SCREEN.1),
            _ => match named_constant(name) {
                Some(v) => Num::float(v),
                None => return Err(RunError::fault(format!("unknown variable `{name}`"), span)),
            },
        };
        Ok(Tracked::num(n, Prov::EMPTY))
    }

    fn write_var(&mut self, name: &str, value: Tracked, span: Span) -> RunResult<()> {
        if let Some(i) = self.find_local(name) {
            let ty = self.locals[i].ty;
            self.locals[i].value = coerce(ty, value, span)?;
            return Ok(());
        }
        if let Some(&i) = self.global_index.get(name) {
            let ty = self.globals[i].ty;
            let t = coerce(ty, value, span)?;
            self.globals[i].value = Tracked {
                value: t.value,
                prov: t.prov.union(Prov::global(i)),
            };
            return Ok(());
        }
        Err(RunError::fault(format!("unknown variable `{name}`"), span))
    }

    fn builtin(&self, b: Builtin) -> Tracked {
        let value = match b {
            Builtin::Width => Value::Number(Num::int(self.width)),
            Builtin::Height => Value::Number(Num::int(self.height)),
            Builtin::MouseX => Value::Number(Num::int(self.mouse.x.floor())),
            Builtin::MouseY => Value::Number(Num::int(self.mouse.y.floor())),
            Builtin::PMouseX => Value::Number(Num::int(self.mouse.px.floor())),
            Builtin::PMouseY => Value::Number(Num::int(self.mouse.py.floor())),
            Builtin::MousePressed => Value::Bool(self.mouse.pressed),
        };
        Tracked {
            value,
            prov: Prov::builtin(b),
        }
    }

    fn binary_values(&self, op: BinaryOp, a: Tracked, b: Tracked, span: Span) -> RunResult<Tracked> {
        let prov = a.prov.union(b.prov);
        let value = match (op, a.value, b.value) {
            (BinaryOp::Add, Value::Text(x), y) => Value::Text(x + &y.to_java_string()),
            (BinaryOp::Add, x, Value::Text(y)) => Value::Text(x.to_java_string() + &y),
            (_, Value::Number(x), Value::Number(y)) => match Num::binary(op, x, y) {
                Some(r) => Value::Number(r.map_err(|e| RunError::fault(e.to_string(), span))?),
                None => Value::Bool(match op {
                    BinaryOp::Lt => x.v < y.v,
                    BinaryOp::Gt => x.v > y.v,
                    BinaryOp::Le => x.v <= y.v,
                    BinaryOp::Ge => x.v >= y.v,
                    BinaryOp::Eq => x.v == y.v,
                    BinaryOp::Ne => x.v != y.v,
                    _ => {
                        return Err(RunError::fault(
                            format!("`{}` needs boolean operands", op.symbol()),
                            span,
                        ))
                    }
                }),
            },
            (BinaryOp::Eq, x, y) if std::mem::discriminant(&x) == std::mem::discriminant(&y) => Value::Bool(x == y),
            (BinaryOp::Ne, x, y) if std::mem::discriminant(&x) == std::mem::discriminant(&y) => Value::Bool(x != y),
            (op, x, y) => {
                return Err(RunError::fault(
                    format!(
                        "`{}` cannot combine {} and {}",
                        op.symbol(),
                        x.type_name(),
                        y.type_name()
                    ),
                    span,
                ))
            }
        };
        Ok(Tracked { value, prov })
    }

    fn eval(&mut self, expr: &'s Expr) -> RunResult<Tracked> {
        Ok(match &expr.kind {
            ExprKind::Number(v) => Tracked::num(Num::float(*v), Prov::EMPTY),
            ExprKind::Int(v) => Tracked::num(Num::int(*v as f64), Prov::EMPTY),
            ExprKind::Str(s) => Tracked::plain(Value::Text(s.clone())),
            ExprKind::Bool(b) => Tracked::plain(Value::Bool(*b)),
            ExprKind::Ident(name) => self.read_var(name, expr.span)?,
            ExprKind::Builtin(b) => self.builtin(*b),
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinaryOp::And | BinaryOp::Or => {
                    let l = self.eval(lhs)?;
                    let Value::Bool(lv) = l.value else {
                        return Err(RunError::fault(
                            format!("`{}` needs boolean operands", op.symbol()),
                            expr.span,
                        ));
                    };
                    let short = if *op == BinaryOp::And { !lv } else { lv };
                    if short {
                        return Ok(l);
                    }
                    let r = self.eval(rhs)?;
                    let Value::Bool(_) = r.value else {
                        return Err(RunError::fault(
                            format!("`{}` needs boolean operands", op.symbol()),
                            expr.span,
                        ));
                    };
                    Tracked {
                        value: r.value,
                        prov: l.prov.union(r.prov),
                    }
                }
                _ => {
                    let l = self.eval(lhs)?;
                    let r = self.eval(rhs)?;
                    self.binary_values(*op, l, r, expr.span)?
                }
            },
            ExprKind::Unary { op, operand } => {
                let t = self.eval(operand)?;
                let value = match (op, t.value) {
                    (UnaryOp::Neg, Value::Number(n)) => Value::Number(-n),
                    (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                    (_, v) => {
                        return Err(RunError::fault(
                            format!("cannot apply this operator to a {}", v.type_name()),
                            expr.span,
                        ))
                    }
                };
                Tracked { value, prov: t.prov }
            }
            ExprKind::Call { callee, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a)?);
                }
                self.call(callee, vals, expr.span)?
            }
        })
    }

    fn numbers(name: &str, args: &[Tracked], span: Span) -> RunResult<Vec<Num>> {
        args.iter()
            .map(|a| match a.value {
                Value::Number(n) => Ok(n),
                ref v => Err(RunError::fault(
                    format!("{name}() expects numbers, got a {}", v.type_name()),
                    span,
                )),
            })
            .collect()
    }

    fn call(&mut self, callee: &str, args: Vec<Tracked>, span: Span) -> RunResult<Tracked> {
        if self.functions.contains_key(callee) {
            return self.call_user(callee, args, span);
        }
        let prov = args.iter().fold(Prov::EMPTY, |p, a| p.union(a.prov));
        if let Some(kind) = ShapeKind::from_callee(callee) {
            self.draw(kind, args, span)?;
            return Ok(Tracked::plain(Value::Number(Num::int(0.0))));
        }
        match callee {
            "color" => {
                let nums = Self::numbers(callee, &args, span)?;
                let raw: Vec<f64> = nums.iter().map(|n| n.v).collect();
                let c = Rgb::from_args(&raw).ok_or_else(|| RunError::fault("color() takes 1 to 4 arguments", span))?;
                return Ok(Tracked::num(Num::int(c.pack()), prov));
            }
            "noFill" => self.fill = None,
            "noStroke" => self.stroke = None,
            "random" => {
                let nums = Self::numbers(callee, &args, span)?;
                let (lo, hi) = match nums.as_slice() {
                    [hi] => (0.0, hi.v),
                    [lo, hi] => (lo.v, hi.v),
                    _ => return Err(RunError::fault("random() takes 1 or 2 arguments", span)),
                };
                let v = if hi > lo { self.rng.gen_range(lo..hi) } else { lo };
                return Ok(Tracked::num(Num::float(v), prov));
            }
            "str" => {
                let s = args.first().map(|a| a.value.to_java_string()).unwrap_or_default();
                return Ok(Tracked {
                    value: Value::Text(s),
                    prov,
                });
            }
            _ => {}
        }
        if pure_numeric(callee, &[]).is_some() {
            let nums = Self::numbers(callee, &args, span)?;
            let raw: Vec<f64> = nums.iter().map(|n| n.v).collect();
            let v = pure_numeric(callee, &raw)
                .expect("pure function")
                .map_err(|e| RunError::fault(e.to_string(), span))?;
            let n = if pure_returns_int(callee, &nums) {
                Num::int(v)
            } else {
                Num::float(v)
            };
            return Ok(Tracked::num(n, prov));
        }
        log::trace!("ignoring call to library function {callee}()");
        Ok(Tracked::plain(Value::Number(Num::int(0.0))))
    }

    fn draw(&mut self, kind: ShapeKind, args: Vec<Tracked>, span: Span) -> RunResult<()> {
        let nums: Vec<f64> = args.iter().map(|a| a.value.as_f64().unwrap_or(f64::NAN)).collect();
        let colour = || {
            if nums.iter().any(|v| v.is_nan()) {
                return Err(RunError::fault(
                    format!("{}() expects numeric colour arguments", kind.name()),
                    span,
                ));
            }
            Rgb::from_args(&nums)
                .ok_or_else(|| RunError::fault(format!("{}() takes 1 to 4 arguments", kind.name()), span))
        };
        match kind {
            ShapeKind::Fill => self.fill = Some(colour()?),
            ShapeKind::Stroke => self.stroke = Some(colour()?),
            ShapeKind::Background => {
                colour()?;
            }
            _ => {}
        }
        let text = (kind == ShapeKind::Text)
            .then(|| args.first().map(|a| a.value.to_java_string()))
            .flatten();
        self.calls.push(DrawCall {
            kind,
            arg_prov: args.iter().map(|a| a.prov).collect(),
            args: nums,
            text,
            fill: self.fill,
            stroke: self.stroke,
            line: span.start_line,
            span,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_source;
    use crate::source::SourceFile;

    fn sketch(src: &str) -> Sketch {
        let (s, d) = parse_source(SourceFile::new("t.pde", src));
        assert!(d.iter().all(|d| !d.is_error()), "{d:?}");
        s
    }

    #[test]
    fn ball_moves_and_provenance_flows() {
        let s = sketch(
            "float bx; float vx = 5;\nvoid setup(){ bx = width/2; }\nvoid draw(){ ellipse(bx, 10, 20, 20); bx = bx + vx; }",
        );
        let mut rt = Runtime::init(&s, 1080.0, 1920.0).unwrap();
        let f0 = rt.step().unwrap().clone();
        let e = f0.nth(ShapeKind::Ellipse, 0).unwrap();
        assert_eq!(e.args[0], 540.0);
        let names = rt.prov_globals(e.arg_prov[0]);
        assert_eq!(names, ["bx"]);
        assert!(e.arg_prov[0].has_builtin(Builtin::Width));
        let f1 = rt.step().unwrap();
        assert_eq!(f1.nth(ShapeKind::Ellipse, 0).unwrap().args[0], 545.0);
        assert_eq!(f1.snapshot["bx"], 550.0);
        let f1_prov = f1.nth(ShapeKind::Ellipse, 0).unwrap().arg_prov[0];
        assert_eq!(rt.prov_globals(f1_prov), ["bx", "vx"]);
    }

    #[test]
    fn events_apply_before_their_frame() {
        let s =
            sketch("boolean on; float y;\nvoid mousePressed(){ on = true; }\nvoid draw(){ if (on) { y = y + 2; } }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        rt.run_with_events(3, &[(1, InputEvent::Press { x: 0.0, y: 0.0 })])
            .unwrap();
        let ys: Vec<f64> = rt.frames().iter().map(|f| f.snapshot["y"]).collect();
        assert_eq!(ys, [0.0, 2.0, 4.0]);
    }

    #[test]
    fn broken_setup_is_refused() {
        let (s, _) = parse_source(SourceFile::new("t.pde", "void setup(){\n  int x = ;\n}"));
        assert!(matches!(
            Runtime::init(&s, 100.0, 100.0),
            Err(RunError::Fault { line: 2, .. })
        ));
    }

    #[test]
    fn literals_have_empty_provenance() {
        let s = sketch("void draw(){ rect(1, 2, 3, 4); }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        let f = rt.step().unwrap();
        assert!(f.calls[0].arg_prov.iter().all(|p| p.is_empty()));
    }

    #[test]
    fn infinite_loop_hits_budget() {
        let s = sketch("void draw(){ while (true) { } }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        assert!(matches!(rt.step(), Err(RunError::Budget { .. })));
    }

    #[test]
    fn allowance_is_shared_between_runtimes() {
        let s = sketch("int n;\nvoid draw(){ for (int i = 0; i < 10; i++) { n++; } }");
        let a = Allowance::new(100);
        let mut first = Runtime::with_allowance(&s, 100.0, 100.0, RunConfig::default(), Some(a.clone())).unwrap();
        first.run(3).unwrap();
        let spent = 100 - a.remaining();
        assert!(spent > 0);
        let mut second = Runtime::with_allowance(&s, 100.0, 100.0, RunConfig::default(), Some(a.clone())).unwrap();
        let err = second.run(100).unwrap_err();
        assert!(matches!(
            err,
            RunError::Budget {
                limit: 100,
                scope: BudgetScope::Shared
            }
        ));
        assert_eq!(a.remaining(), 0);
    }

    #[test]
    fn runaway_recursion_faults() {
        let s = sketch("void f(){ f(); }\nvoid draw(){ f(); }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        assert!(matches!(rt.step(), Err(RunError::Fault { line: 1, .. })));
    }

    #[test]
    fn division_by_zero_faults() {
        let s = sketch("int z = 0;\nvoid draw(){\n  int q = 4 / z;\n}");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        assert!(matches!(rt.step(), Err(RunError::Fault { line: 3, .. })));
    }

    #[test]
    fn events_and_mouse_state() {
        let s = sketch(
            "boolean on = false; float py;\nvoid mousePressed(){ on = true; }\nvoid draw(){ if (mousePressed) { py = mouseY; } }",
        );
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        rt.inject(InputEvent::Press { x: 10.0, y: 42.0 }).unwrap();
        assert_eq!(rt.global("on"), Some(&Value::Bool(true)));
        let f = rt.step().unwrap();
        assert_eq!(f.snapshot["py"], 42.0);
        rt.inject(InputEvent::Release).unwrap();
        rt.inject(InputEvent::Move { x: 1.0, y: 7.0 }).unwrap();
        assert_eq!(rt.step().unwrap().snapshot["py"], 42.0);
    }

    #[test]
    fn fill_state_persists_across_frames() {
        let s = sketch("void setup(){ fill(255, 0, 0); }\nvoid draw(){ rect(0, 0, 1, 1); }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        rt.step().unwrap();
        let f = rt.step().unwrap();
        assert_eq!(f.calls[0].fill, Some(Rgb([255.0, 0.0, 0.0])));
    }

    #[test]
    fn set_global_resets_provenance_and_truncates_ints() {
        let s = sketch("int a = 3; float b = 0;\nvoid draw(){ b = a + 0.5; }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        rt.set_global("a", 7.9).unwrap();
        assert_eq!(rt.global_number("a"), Some(7.0));
        assert_eq!(rt.step().unwrap().snapshot["b"], 7.5);
        let err = rt.set_global("nope", 1.0).unwrap_err().to_string();
        assert!(err.contains("nope") && err.contains("a, b"), "{err}");
    }

    #[test]
    fn text_uses_java_strings() {
        let s = sketch("int score = 3;\nvoid draw(){ text(\"Score: \" + score, 0, 0); text(score, 5, 5); }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        let f = rt.step().unwrap().clone();
        assert_eq!(f.calls[0].text.as_deref(), Some("Score: 3"));
        assert!(f.calls[0].args[0].is_nan());
        assert_eq!(f.calls[1].args[0], 3.0);
        assert_eq!(rt.prov_globals(f.calls[0].arg_prov[0]), ["score"]);
    }

    #[test]
    fn random_is_deterministic() {
        let s = sketch("float r;\nvoid draw(){ r = random(10); }");
        let run = || {
            let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
            rt.run(3).unwrap();
            rt.global_number("r").unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn type_errors_fault() {
        let s = sketch("int x = 1;\nvoid draw(){ if (x) { x = 2; } }");
        let mut rt = Runtime::init(&s, 100.0, 100.0).unwrap();
        assert!(matches!(rt.step(), Err(RunError::Fault { .. })));
    }
}
