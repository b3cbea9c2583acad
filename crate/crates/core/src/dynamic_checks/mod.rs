//! Behavioural checks that drive the runtime and watch the game play.
//!
//! Entities are bound once per sketch from a short baseline run; every check
//! then starts a fresh runtime, injects input or overrides globals, and
//! judges the drawn positions it observes.

mod checks;
mod entities;

use std::collections::BTreeSet;

use crate::check::{CheckId, CheckResult};
use crate::runtime::{find_velocity_vars, Allowance, Frame, InputEvent, RunConfig, RunError, Runtime, VelocityPair};
use crate::sketch::{Builtin, Expr, ExprKind, Sketch, StmtKind, UnaryOp};
use crate::static_checks::callgraph::{mutable_globals, reachable};
use crate::static_checks::Screen;

pub use checks::*;
pub use entities::{identify_entities, EntityBinding, Role};

/// Frames in the baseline run used to bind entities.
pub const BASELINE_FRAMES: usize = 10;
/// Unpressed frames at the start of the baseline, so paddles and scores are
/// read before any input moves them.
pub const QUIET_FRAMES: usize = 3;
pub const BOUNCE_FRAMES: usize = 6;
pub const EXIT_FRAMES: usize = 10;
pub const PADDLE_BOUNCE_FRAMES: usize = 8;
pub const FALLBACK_FRAMES: usize = 400;
pub const DEFAULT_RADIUS: f64 = 25.0;
/// Speed assumed when a velocity global is zero.
pub const DEFAULT_SPEED: f64 = 5.0;
/// Statements shared by every run of one sketch. A Pong game needs a few
/// hundred thousand over all checks; this bounds grading time for sketches
/// that spin.
pub const SKETCH_ALLOWANCE: u64 = 5_000_000;

/// Everything the dynamic checks share for one sketch.
pub struct DynamicContext<'a> {
    pub sketch: &'a Sketch,
    pub width: f64,
    pub height: f64,
    /// Boolean global that must be set by a press before the ball moves.
    pub gate: Option<String>,
    pub velocity: Vec<VelocityPair>,
    pub mutable: BTreeSet<String>,
    /// The baseline trace, or the error that stopped it.
    pub baseline: Result<Vec<Frame>, RunError>,
    pub entities: Vec<EntityBinding>,
    allowance: Allowance,
}

impl<'a> DynamicContext<'a> {
    pub fn new(sketch: &'a Sketch, screen: &Screen) -> Self {
        let gate = detect_gate(sketch);
        let velocity = find_velocity_vars(sketch);
        let mutable = mutable_globals(sketch);
        let mut ctx = DynamicContext {
            sketch,
            width: screen.width,
            height: screen.height,
            gate,
            velocity,
            mutable,
            baseline: Ok(Vec::new()),
            entities: Vec::new(),
            allowance: Allowance::new(SKETCH_ALLOWANCE),
        };
        ctx.baseline = ctx.run_baseline();
        if let Ok(frames) = &ctx.baseline {
            ctx.entities = identify_entities(sketch, frames, ctx.width, ctx.height, &ctx.mutable, &ctx.velocity);
        }
        ctx
    }

    fn run_baseline(&self) -> Result<Vec<Frame>, RunError> {
        let mut rt = self.runtime(BASELINE_FRAMES)?;
        rt.run(QUIET_FRAMES)?;
        if self.gate.is_some() {
            self.start_game(&mut rt)?;
        }
        while rt.frame_count() < BASELINE_FRAMES {
            rt.step()?;
        }
        Ok(rt.frames().to_vec())
    }

    /// A fresh runtime with budgets sized for `frames` frames.
    pub fn runtime(&self, frames: usize) -> Result<Runtime<'a>, RunError> {
        Runtime::with_allowance(
            self.sketch,
            self.width,
            self.height,
            RunConfig::for_frames(frames as u64 + 8),
            Some(self.allowance.clone()),
        )
    }

    /// Presses mid-screen for one frame when the sketch is gated on a press.
    pub fn start_game(&self, rt: &mut Runtime) -> Result<(), RunError> {
        if self.gate.is_none() {
            return Ok(());
        }
        rt.inject(InputEvent::Press {
            x: self.width / 2.0,
            y: self.height / 2.0,
        })?;
        rt.step()?;
        rt.inject(InputEvent::Release)
    }

    pub fn entity(&self, role: Role) -> Option<&EntityBinding> {
        self.entities.iter().find(|e| e.role == role)
    }

    /// The velocity global paired with one of `positions`.
    pub fn velocity_for(&self, positions: &BTreeSet<String>) -> Option<&VelocityPair> {
        self.velocity.iter().find(|p| positions.contains(&p.position))
    }
}

/// Runs one dynamic check. Static ids are rejected as an error result.
pub fn run_dynamic_check(ctx: &DynamicContext, id: CheckId) -> CheckResult {
    if let Err(e) = &ctx.baseline {
        return checks::run_error(id, e);
    }
    match id {
        CheckId::MovingBall => check_moving_ball(ctx),
        CheckId::GameOn => check_game_on(ctx),
        CheckId::WallsBounceTop => check_walls_bounce(ctx, Wall::Top),
        CheckId::WallsBounceBottom => check_walls_bounce(ctx, Wall::Bottom),
        CheckId::LeftWall => check_wall_exit(ctx, Side::Left),
        CheckId::RightWall => check_wall_exit(ctx, Side::Right),
        CheckId::MoveLeftPaddle => check_move_paddle(ctx, Side::Left),
        CheckId::MoveRightPaddle => check_move_paddle(ctx, Side::Right),
        CheckId::BounceLeftPaddle => check_bounce_paddle(ctx, Side::Left),
        CheckId::BounceRightPaddle => check_bounce_paddle(ctx, Side::Right),
        other => CheckResult::error(other, format!("{} is not a behavioural check", other.name())),
    }
}

fn mentions(expr: &Expr, pred: &dyn Fn(&ExprKind) -> bool) -> bool {
    let mut hit = false;
    expr.walk(&mut |e| hit |= pred(&e.kind));
    hit
}

/// A boolean global switched on by a press and tested in a condition that
/// draw() reaches.
pub fn detect_gate(sketch: &Sketch) -> Option<String> {
    let is_bool_global = |n: &str| {
        sketch
            .global(n)
            .is_some_and(|g| g.type_name == crate::sketch::TypeName::Boolean)
    };
    let switch_on = |target: &str, value: &Expr| match &value.kind {
        ExprKind::Bool(true) => true,
        ExprKind::Unary {
            op: UnaryOp::Not,
            operand,
        } => operand.as_ident() == Some(target),
        _ => false,
    };
    let mut set = BTreeSet::new();
    for f in reachable(sketch, &["mousePressed", "mouseReleased", "mouseClicked"]) {
        f.body.walk(&mut |s| {
            if let StmtKind::Assign { target, value, .. } = &s.kind {
                if is_bool_global(target) && switch_on(target, value) {
                    set.insert(target.clone());
                }
            }
        });
    }
    let draw_fns = reachable(sketch, &["draw"]);
    let pressed = |k: &ExprKind| matches!(k, ExprKind::Builtin(Builtin::MousePressed));
    for f in &draw_fns {
        f.body.walk(&mut |s| {
            let StmtKind::If { cond, then_branch, .. } = &s.kind else {
                return;
            };
            if !mentions(cond, &pressed) {
                return;
            }
            then_branch.walk(&mut |inner| {
                if let StmtKind::Assign { target, value, .. } = &inner.kind {
                    if is_bool_global(target) && switch_on(target, value) {
                        set.insert(target.clone());
                    }
                }
            });
        });
    }
    let mut tested = BTreeSet::new();
    for f in &draw_fns {
        f.body.walk(&mut |s| {
            let cond = match &s.kind {
                StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => cond,
                StmtKind::For { cond: Some(c), .. } => c,
                _ => return,
            };
            cond.walk(&mut |e| {
                if let ExprKind::Ident(n) = &e.kind {
                    tested.insert(n.clone());
                }
            });
        });
    }
    sketch
        .globals
        .iter()
        .map(|g| &g.name)
        .find(|n| set.contains(*n) && tested.contains(*n))
        .cloned()
}
