use crate::check::{CheckId, CheckResult};
use crate::runtime::{Frame, InputEvent, RunError, RunResult, Runtime};
use crate::source::Span;
use crate::static_checks::{ShapeKind, POSITION_TOLERANCE};

use super::{
    DynamicContext, EntityBinding, Role, BASELINE_FRAMES, BOUNCE_FRAMES, DEFAULT_SPEED, EXIT_FRAMES, FALLBACK_FRAMES,
    PADDLE_BOUNCE_FRAMES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Fraction of the width where the mouse controls this side's paddle.
    fn mouse_x(self) -> f64 {
        match self {
            Side::Left => 0.25,
            Side::Right => 0.75,
        }
    }

    fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// +1 when moving away from this side's wall.
    fn away(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

pub(crate) fn run_error(id: CheckId, e: &RunError) -> CheckResult {
    let r = CheckResult::error(id, format!("The sketch stopped while being tested: {e}"));
    match e {
        RunError::Fault { line, .. } if *line > 0 => r.with_span(Span::at_line(*line)),
        _ => r,
    }
}

fn guarded(id: CheckId, f: impl FnOnce() -> RunResult<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| run_error(id, &e))
}

fn no_ball(id: CheckId) -> CheckResult {
    CheckResult::skipped(id, "No ball (an ellipse) was drawn, so this could not be tested")
}

fn last<'r>(rt: &'r Runtime) -> &'r Frame {
    rt.frames().last().expect("at least one frame was run")
}

/// Whether the sequence moves toward `-sign`, then turns to `+sign` by a
/// step no bigger than `max_step`.
fn turns(values: &[f64], sign: f64, max_step: f64) -> bool {
    let deltas: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) * sign).collect();
    match deltas.iter().position(|d| *d < 0.0) {
        Some(i) => deltas[i + 1..].iter().any(|d| *d > 0.0 && *d <= max_step),
        None => false,
    }
}

/// Frames where motion toward `-sign` turns to `+sign`, with the incoming
/// step. Jumps over three times the incoming step are resets, not turns.
fn turning_points(values: &[f64], sign: f64) -> Vec<(usize, f64)> {
    let mut moves: Vec<(usize, f64)> = Vec::new();
    for (i, w) in values.windows(2).enumerate() {
        let d = (w[1] - w[0]) * sign;
        if d != 0.0 {
            moves.push((i, d));
        }
    }
    moves
        .windows(2)
        .filter(|w| w[0].1 < 0.0 && w[1].1 > 0.0 && w[1].1 <= 3.0 * -w[0].1 + 1.0)
        .map(|w| (w[1].0, -w[0].1))
        .collect()
}

/// Picks which global to override for a coordinate: the one a velocity
/// pair moves, else the first bound one.
fn pick_var<'c>(
    ctx: &'c DynamicContext,
    vars: &'c std::collections::BTreeSet<String>,
) -> Option<(&'c str, Option<&'c str>)> {
    if let Some(p) = ctx.velocity_for(vars) {
        return Some((&p.position, Some(&p.velocity)));
    }
    vars.iter().next().map(|v| (v.as_str(), None))
}

fn speed_of(rt: &Runtime, velocity: Option<&str>) -> f64 {
    match velocity.and_then(|v| rt.global_number(v)) {
        Some(v) if v.abs() > 0.0 => v.abs(),
        _ => DEFAULT_SPEED,
    }
}

/// Rewrites each variable with its own value and steps once, returning
/// drawn minus stored for each `(var, arg)`; `None` if the entity vanished.
fn calibrate(rt: &mut Runtime, ent: &EntityBinding, vars: &[(&str, usize)]) -> RunResult<Option<Vec<f64>>> {
    let mut stored = Vec::new();
    for (v, _) in vars {
        let Some(x) = rt.global_number(v) else {
            return Ok(None);
        };
        rt.set_global(v, x)?;
        stored.push(x);
    }
    let frame = rt.step()?;
    let Some(args) = ent.args(frame) else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for ((_, arg), s) in vars.iter().zip(stored) {
        match args.get(*arg) {
            Some(d) if d.is_finite() => out.push(d - s),
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Ball positions across a short run, pressing first if the game is gated.
pub fn check_moving_ball(ctx: &DynamicContext) -> CheckResult {
    let id = CheckId::MovingBall;
    let Some(ball) = ctx.entity(Role::Ball) else {
        return no_ball(id);
    };
    guarded(id, || {
        let mut rt = ctx.runtime(BASELINE_FRAMES)?;
        ctx.start_game(&mut rt)?;
        while rt.frame_count() < BASELINE_FRAMES {
            rt.step()?;
        }
        let pos: Vec<_> = rt.frames().iter().map(|f| ball.position(f)).collect();
        let changes = pos
            .windows(2)
            .filter(|w| matches!(w, [Some(a), Some(b)] if a != b))
            .count();
        Ok(if changes >= 2 {
            CheckResult::pass(id)
        } else {
            CheckResult::fail(
                id,
                format!("The ball changed position in {changes} of {} frames", pos.len() - 1),
            )
        })
    })
}

/// The ball stays put until a press, then moves.
pub fn check_game_on(ctx: &DynamicContext) -> CheckResult {
    let id = CheckId::GameOn;
    let Some(ball) = ctx.entity(Role::Ball) else {
        return no_ball(id);
    };
    guarded(id, || {
        let mut rt = ctx.runtime(10)?;
        rt.run(5)?;
        let before: Vec<_> = rt.frames().iter().map(|f| ball.position(f)).collect();
        if let Some(k) = before.windows(2).position(|w| w[0] != w[1]) {
            return Ok(CheckResult::fail(id, "The ball moved before the mouse was pressed").with_frame(k + 1));
        }
        rt.inject(InputEvent::Press {
            x: ctx.width / 2.0,
            y: ctx.height / 2.0,
        })?;
        rt.step()?;
        rt.inject(InputEvent::Release)?;
        rt.run(4)?;
        let rest = &rt.frames()[5..];
        let moved = rest.iter().any(|f| ball.position(f) != before[4]);
        Ok(if moved {
            CheckResult::pass(id)
        } else {
            CheckResult::fail(id, "The ball did not start moving after the mouse was pressed")
        })
    })
}

/// Places the ball just inside the wall, heading toward it, and expects the
/// vertical motion to reverse while staying on screen.
pub fn check_walls_bounce(ctx: &DynamicContext, wall: Wall) -> CheckResult {
    let id = match wall {
        Wall::Top => CheckId::WallsBounceTop,
        Wall::Bottom => CheckId::WallsBounceBottom,
    };
    let Some(ball) = ctx.entity(Role::Ball) else {
        return no_ball(id);
    };
    let sign = match wall {
        Wall::Top => 1.0,
        Wall::Bottom => -1.0,
    };
    guarded(id, || {
        if let Some(verdict) = bounce_by_override(ctx, ball, wall, sign, id)? {
            return Ok(verdict);
        }
        wall_bounce_fallback(ctx, ball, wall, sign, id)
    })
}

fn bounce_by_override(
    ctx: &DynamicContext,
    ball: &EntityBinding,
    wall: Wall,
    sign: f64,
    id: CheckId,
) -> RunResult<Option<CheckResult>> {
    let Some((y_var, Some(vy_var))) = pick_var(ctx, &ball.y_vars) else {
        return Ok(None);
    };
    let mut rt = ctx.runtime(BOUNCE_FRAMES + 4)?;
    ctx.start_game(&mut rt)?;
    let speed = speed_of(&rt, Some(vy_var));
    rt.set_global(vy_var, -sign * speed)?;
    let Some(offset) = calibrate(&mut rt, ball, &[(y_var, 1)])? else {
        return Ok(None);
    };
    let target = match wall {
        Wall::Top => ball.radius + 2.0 * speed,
        Wall::Bottom => ctx.height - ball.radius - 2.0 * speed,
    };
    rt.set_global(vy_var, -sign * speed)?;
    rt.set_global(y_var, target - offset[0])?;
    let mut ys = Vec::new();
    for _ in 0..BOUNCE_FRAMES {
        match ball.position(rt.step()?) {
            Some((_, y)) => ys.push(y),
            None => break,
        }
    }
    // An override that draw() overwrites says nothing about bouncing.
    if ys.first().is_none_or(|y0| (y0 - target).abs() > 3.0 * speed + 1.0) {
        return Ok(None);
    }
    let on_screen = ys.iter().all(|y| (0.0..=ctx.height).contains(y));
    Ok(Some(if turns(&ys, sign, 3.0 * speed + 1.0) && on_screen {
        CheckResult::pass(id)
    } else if !on_screen {
        CheckResult::fail(id, "The ball left the screen instead of bouncing off the wall")
    } else {
        CheckResult::fail(id, "The ball did not bounce off the wall")
    }))
}

fn wall_bounce_fallback(
    ctx: &DynamicContext,
    ball: &EntityBinding,
    wall: Wall,
    sign: f64,
    id: CheckId,
) -> RunResult<CheckResult> {
    let mut rt = ctx.runtime(FALLBACK_FRAMES + 2)?;
    ctx.start_game(&mut rt)?;
    rt.run(FALLBACK_FRAMES)?;
    let ys: Vec<f64> = rt
        .frames()
        .iter()
        .filter_map(|f| ball.position(f))
        .map(|p| p.1)
        .collect();
    let near = |y: f64, step: f64| {
        let reach = ball.radius + 2.0 * step + POSITION_TOLERANCE;
        match wall {
            Wall::Top => y <= reach,
            Wall::Bottom => y >= ctx.height - reach,
        }
    };
    let bounced = turning_points(&ys, sign).into_iter().any(|(i, step)| near(ys[i], step));
    Ok(if bounced {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, "The ball was never seen bouncing off the wall")
    })
}

/// Sends the ball out through one side wall and expects the opposite
/// player's score to go up.
pub fn check_wall_exit(ctx: &DynamicContext, side: Side) -> CheckResult {
    let (id, scorer) = match side {
        Side::Left => (CheckId::LeftWall, Role::RightScore),
        Side::Right => (CheckId::RightWall, Role::LeftScore),
    };
    let Some(ball) = ctx.entity(Role::Ball) else {
        return no_ball(id);
    };
    let Some(score) = ctx.entity(scorer) else {
        return CheckResult::skipped(
            id,
            "No score was drawn on the scoring player's side, so this could not be tested",
        );
    };
    guarded(id, || {
        let Some((x_var, vx_var)) = pick_var(ctx, &ball.x_vars) else {
            return exit_fallback(ctx, score, id);
        };
        let mut rt = ctx.runtime(EXIT_FRAMES + 4)?;
        ctx.start_game(&mut rt)?;
        let speed = speed_of(&rt, vx_var);
        let out = -side.away() * speed;
        let y = pick_var(ctx, &ball.y_vars);
        let mut vars = vec![(x_var, 0)];
        if let Some((y_var, vy_var)) = y {
            vars.push((y_var, 1));
            if let Some(v) = vy_var {
                rt.set_global(v, 0.0)?;
            }
        }
        if let Some(v) = vx_var {
            rt.set_global(v, out)?;
        }
        let Some(offset) = calibrate(&mut rt, ball, &vars)? else {
            return exit_fallback(ctx, score, id);
        };
        let Some(before) = score.score(last(&rt)) else {
            return Ok(CheckResult::fail(id, "The score could not be read as a number"));
        };
        let target_x = match side {
            Side::Left => -(ball.radius + speed + 1.0),
            Side::Right => ctx.width + ball.radius + speed + 1.0,
        };
        let clear_y = clear_of_paddles(ctx, last(&rt), ball.radius);
        if let Some(v) = vx_var {
            rt.set_global(v, out)?;
        }
        rt.set_global(x_var, target_x - offset[0])?;
        if let Some((y_var, vy_var)) = y {
            rt.set_global(y_var, clear_y - offset[1])?;
            if let Some(v) = vy_var {
                rt.set_global(v, 0.0)?;
            }
        }
        for _ in 0..EXIT_FRAMES {
            let frame = rt.step()?;
            if score.score(frame).is_some_and(|s| s >= before + 1.0) {
                return Ok(CheckResult::pass(id));
            }
        }
        Ok(CheckResult::fail(
            id,
            "The score did not go up when the ball left the screen",
        ))
    })
}

/// A height for the ball that keeps it clear of every drawn rect.
fn clear_of_paddles(ctx: &DynamicContext, frame: &Frame, radius: f64) -> f64 {
    let rects: Vec<&[f64]> = frame
        .calls_of(ShapeKind::Rect)
        .map(|c| c.args.as_slice())
        .filter(|a| a.len() >= 4 && a.iter().all(|v| v.is_finite()))
        .collect();
    [0.5, 0.25, 0.75, 0.1, 0.9]
        .into_iter()
        .map(|f| f * ctx.height)
        .find(|y| rects.iter().all(|r| y + radius < r[1] || y - radius > r[1] + r[3]))
        .unwrap_or(ctx.height / 2.0)
}

fn exit_fallback(ctx: &DynamicContext, score: &EntityBinding, id: CheckId) -> RunResult<CheckResult> {
    let mut rt = ctx.runtime(FALLBACK_FRAMES + 2)?;
    ctx.start_game(&mut rt)?;
    rt.run(FALLBACK_FRAMES)?;
    let values: Vec<f64> = rt.frames().iter().filter_map(|f| score.score(f)).collect();
    let rose = values.windows(2).any(|w| w[1] >= w[0] + 1.0);
    Ok(if rose {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, "The score never went up while the game was running")
    })
}

/// Drags on one half of the screen and expects only that side's paddle to
/// follow the mouse down the screen.
pub fn check_move_paddle(ctx: &DynamicContext, side: Side) -> CheckResult {
    let (id, role) = match side {
        Side::Left => (CheckId::MoveLeftPaddle, Role::LeftPaddle),
        Side::Right => (CheckId::MoveRightPaddle, Role::RightPaddle),
    };
    let Some(paddle) = ctx.entity(role) else {
        return CheckResult::skipped(id, "No pair of paddles was drawn, so this could not be tested");
    };
    guarded(id, || {
        let mut rt = ctx.runtime(14)?;
        let (w, h) = (ctx.width, ctx.height);
        let y_at = |rt: &mut Runtime, ev: InputEvent| -> RunResult<Option<f64>> {
            rt.inject(ev)?;
            rt.step()?;
            // draw() may show the paddle before moving it.
            Ok(paddle.position(rt.step()?).map(|p| p.1))
        };
        let own = side.mouse_x() * w;
        let mut follow = vec![y_at(&mut rt, InputEvent::Press { x: own, y: 0.2 * h })?];
        for f in [0.5, 0.8] {
            follow.push(y_at(&mut rt, InputEvent::Move { x: own, y: f * h })?);
        }
        let other = side.other().mouse_x() * w;
        let mut still = Vec::new();
        for f in [0.8, 0.5, 0.2] {
            still.push(y_at(&mut rt, InputEvent::Move { x: other, y: f * h })?);
        }
        rt.inject(InputEvent::Release)?;
        let Some(ys) = follow.into_iter().collect::<Option<Vec<f64>>>() else {
            return Ok(CheckResult::fail(id, "The paddle's position could not be read"));
        };
        if !ys.windows(2).all(|p| p[1] > p[0]) {
            return Ok(CheckResult::fail(id, "The paddle did not follow the mouse"));
        }
        let held = ys[2];
        if still.iter().any(|y| *y != Some(held)) {
            return Ok(CheckResult::fail(
                id,
                "The paddle moved when the mouse was on the other half of the screen",
            ));
        }
        Ok(CheckResult::pass(id))
    })
}

/// Parks the paddle mid-height and sends the ball at its face; the ball
/// must turn around without crossing the paddle.
pub fn check_bounce_paddle(ctx: &DynamicContext, side: Side) -> CheckResult {
    let (id, role) = match side {
        Side::Left => (CheckId::BounceLeftPaddle, Role::LeftPaddle),
        Side::Right => (CheckId::BounceRightPaddle, Role::RightPaddle),
    };
    let Some(ball) = ctx.entity(Role::Ball) else {
        return no_ball(id);
    };
    let Some(paddle) = ctx.entity(role) else {
        return CheckResult::skipped(id, "No pair of paddles was drawn, so this could not be tested");
    };
    guarded(id, || {
        if let Some(verdict) = paddle_by_override(ctx, ball, paddle, side, id)? {
            return Ok(verdict);
        }
        paddle_fallback(ctx, ball, paddle, side, id)
    })
}

/// Presses on this side's half at mid-height so the paddle moves there,
/// leaving the game switched on.
fn park_paddle(ctx: &DynamicContext, rt: &mut Runtime, side: Side) -> RunResult<()> {
    rt.inject(InputEvent::Press {
        x: side.mouse_x() * ctx.width,
        y: ctx.height / 2.0,
    })?;
    rt.run(2)?;
    rt.inject(InputEvent::Release)?;
    if let Some(g) = &ctx.gate {
        rt.set_global_bool(g, true)?;
    }
    Ok(())
}

fn paddle_by_override(
    ctx: &DynamicContext,
    ball: &EntityBinding,
    paddle: &EntityBinding,
    side: Side,
    id: CheckId,
) -> RunResult<Option<CheckResult>> {
    let Some((x_var, Some(vx_var))) = pick_var(ctx, &ball.x_vars) else {
        return Ok(None);
    };
    let Some((y_var, vy_var)) = pick_var(ctx, &ball.y_vars) else {
        return Ok(None);
    };
    let mut rt = ctx.runtime(PADDLE_BOUNCE_FRAMES + 6)?;
    park_paddle(ctx, &mut rt, side)?;
    let speed = speed_of(&rt, Some(vx_var));
    let inward = -side.away() * speed;
    let aim = |rt: &mut Runtime| -> RunResult<()> {
        rt.set_global(vx_var, inward)?;
        if let Some(v) = vy_var {
            rt.set_global(v, 0.0)?;
        }
        Ok(())
    };
    aim(&mut rt)?;
    let Some(offset) = calibrate(&mut rt, ball, &[(x_var, 0), (y_var, 1)])? else {
        return Ok(None);
    };
    let Some(rect) = paddle.args(last(&rt)).filter(|a| a.len() >= 4).map(<[f64]>::to_vec) else {
        return Ok(Some(CheckResult::fail(id, "The paddle's position could not be read")));
    };
    let (px, py, pw, ph) = (rect[0], rect[1], rect[2], rect[3]);
    let target = match side {
        Side::Left => px + pw + ball.radius + 2.0 * speed,
        Side::Right => px - ball.radius - 2.0 * speed,
    };
    aim(&mut rt)?;
    rt.set_global(x_var, target - offset[0])?;
    rt.set_global(y_var, py + ph / 2.0 - offset[1])?;
    let mut xs = Vec::new();
    for _ in 0..PADDLE_BOUNCE_FRAMES {
        match ball.position(rt.step()?) {
            Some((x, _)) => xs.push(x),
            None => break,
        }
    }
    if xs.first().is_none_or(|x0| (x0 - target).abs() > 3.0 * speed + 1.0) {
        return Ok(None);
    }
    let through = match side {
        Side::Left => xs.iter().any(|x| *x < px),
        Side::Right => xs.iter().any(|x| *x > px + pw),
    };
    Ok(Some(if turns(&xs, side.away(), 3.0 * speed + 1.0) && !through {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, "The ball did not bounce off the paddle")
    }))
}

fn paddle_fallback(
    ctx: &DynamicContext,
    ball: &EntityBinding,
    paddle: &EntityBinding,
    side: Side,
    id: CheckId,
) -> RunResult<CheckResult> {
    let mut rt = ctx.runtime(FALLBACK_FRAMES + 4)?;
    ctx.start_game(&mut rt)?;
    let mouse_x = side.mouse_x() * ctx.width;
    rt.inject(InputEvent::Press {
        x: mouse_x,
        y: ctx.height / 2.0,
    })?;
    let mut xs = Vec::new();
    let mut rects = Vec::new();
    for _ in 0..FALLBACK_FRAMES {
        let frame = rt.step()?;
        let pos = ball.position(frame);
        if let (Some((x, y)), Some(r)) = (pos, paddle.args(frame).filter(|a| a.len() >= 4)) {
            xs.push(x);
            rects.push(r.to_vec());
            rt.inject(InputEvent::Move { x: mouse_x, y })?;
        }
    }
    let bounced = turning_points(&xs, side.away()).into_iter().any(|(i, step)| {
        let (x, r) = (xs[i], &rects[i]);
        let reach = ball.radius + 2.0 * step + POSITION_TOLERANCE;
        match side {
            Side::Left => x >= r[0] && x <= r[0] + r[2] + reach,
            Side::Right => x <= r[0] + r[2] && x >= r[0] - reach,
        }
    });
    Ok(if bounced {
        CheckResult::pass(id)
    } else {
        CheckResult::fail(id, "The ball was never seen bouncing off the paddle")
    })
}
