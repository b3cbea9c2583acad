use std::collections::BTreeSet;

use crate::runtime::{Frame, Prov, VelocityPair};
use crate::sketch::Sketch;
use crate::static_checks::ShapeKind;

use super::DEFAULT_RADIUS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Ball,
    LeftPaddle,
    RightPaddle,
    LeftScore,
    RightScore,
}

/// A game entity tied to the `ordinal`th call of `draw_kind` in each frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityBinding {
    pub role: Role,
    pub draw_kind: ShapeKind,
    pub ordinal: usize,
    pub x_vars: BTreeSet<String>,
    pub y_vars: BTreeSet<String>,
    /// The global holding a score's value.
    pub value_var: Option<String>,
    /// Half the drawn width; only meaningful for the ball.
    pub radius: f64,
}

impl EntityBinding {
    fn new(role: Role, draw_kind: ShapeKind, ordinal: usize) -> Self {
        EntityBinding {
            role,
            draw_kind,
            ordinal,
            x_vars: BTreeSet::new(),
            y_vars: BTreeSet::new(),
            value_var: None,
            radius: DEFAULT_RADIUS,
        }
    }

    /// The drawn arguments of this entity in `frame`.
    pub fn args<'f>(&self, frame: &'f Frame) -> Option<&'f [f64]> {
        frame.nth(self.draw_kind, self.ordinal).map(|c| c.args.as_slice())
    }

    /// Drawn (x, y), if both are numbers.
    pub fn position(&self, frame: &Frame) -> Option<(f64, f64)> {
        let a = self.args(frame)?;
        match a {
            [x, y, ..] if x.is_finite() && y.is_finite() => Some((*x, *y)),
            _ => None,
        }
    }

    /// A score's value: its global if bound, else the drawn number.
    pub fn score(&self, frame: &Frame) -> Option<f64> {
        if let Some(v) = self.value_var.as_ref().and_then(|n| frame.snapshot.get(n)) {
            return Some(*v);
        }
        let call = frame.nth(self.draw_kind, self.ordinal)?;
        match call.args.first() {
            Some(v) if v.is_finite() => Some(*v),
            _ => call.text.as_deref().and_then(|t| t.trim().parse().ok()),
        }
    }
}

fn names(sketch: &Sketch, prov: Prov) -> BTreeSet<String> {
    prov.globals()
        .filter_map(|i| sketch.globals.get(i))
        .map(|g| g.name.clone())
        .collect()
}

fn arg_prov(frames: &[Frame], kind: ShapeKind, ordinal: usize, arg: usize) -> Prov {
    frames
        .iter()
        .filter_map(|f| f.nth(kind, ordinal))
        .filter_map(|c| c.arg_prov.get(arg).copied())
        .fold(Prov::EMPTY, Prov::union)
}

/// Globals whose per-frame change matches the drawn coordinate's change,
/// either in the same frame or one frame later.
fn correlated(frames: &[Frame], drawn: &[Option<f64>], candidates: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for name in candidates {
        let series: Vec<Option<f64>> = frames.iter().map(|f| f.snapshot.get(name).copied()).collect();
        for lag in 0..=1 {
            let mut moved = false;
            let mut ok = true;
            for k in 1 + lag..drawn.len() {
                match (drawn[k], drawn[k - 1], series[k - lag], series[k - 1 - lag]) {
                    (Some(d1), Some(d0), Some(s1), Some(s0)) => {
                        ok &= ((d1 - d0) - (s1 - s0)).abs() < 1e-9;
                        moved |= d1 != d0;
                    }
                    _ => ok = false,
                }
            }
            if ok && moved {
                out.insert(name.clone());
            }
        }
    }
    out
}

fn bind_ball(
    sketch: &Sketch,
    frames: &[Frame],
    mutable: &BTreeSet<String>,
    velocity: &[VelocityPair],
) -> Option<EntityBinding> {
    let count = frames.iter().map(|f| f.calls_of(ShapeKind::Ellipse).count()).max()?;
    let speeds: BTreeSet<&str> = velocity.iter().map(|p| p.velocity.as_str()).collect();
    let position_vars = |arg: usize, ord: usize| -> BTreeSet<String> {
        names(sketch, arg_prov(frames, ShapeKind::Ellipse, ord, arg))
            .into_iter()
            .filter(|n| mutable.contains(n) && !speeds.contains(n.as_str()))
            .collect()
    };
    let mut best: Option<((bool, bool, bool), EntityBinding)> = None;
    for ord in 0..count {
        let mut b = EntityBinding::new(Role::Ball, ShapeKind::Ellipse, ord);
        let pos: Vec<Option<(f64, f64)>> = frames.iter().map(|f| b.position(f)).collect();
        let moves = pos.windows(2).any(|w| matches!(w, [Some(a), Some(b)] if a != b));
        b.x_vars = position_vars(0, ord);
        b.y_vars = position_vars(1, ord);
        if moves && b.x_vars.is_empty() && b.y_vars.is_empty() {
            let xs: Vec<_> = pos.iter().map(|p| p.map(|p| p.0)).collect();
            let ys: Vec<_> = pos.iter().map(|p| p.map(|p| p.1)).collect();
            b.x_vars = correlated(frames, &xs, mutable);
            b.y_vars = correlated(frames, &ys, mutable);
        }
        let has_vars = !b.x_vars.is_empty() || !b.y_vars.is_empty();
        let rank = (moves && has_vars, has_vars, moves);
        if best.as_ref().is_none_or(|(r, _)| rank > *r) {
            best = Some((rank, b));
        }
    }
    let (_, mut ball) = best?;
    let diameter = frames
        .iter()
        .find_map(|f| ball.args(f).and_then(|a| a.get(2).copied()))
        .filter(|d| d.is_finite() && *d > 0.0);
    ball.radius = diameter.map_or(DEFAULT_RADIUS, |d| d / 2.0);
    Some(ball)
}

fn bind_paddles(frame: &Frame, width: f64, height: f64) -> Option<(usize, usize)> {
    let rects: Vec<(usize, &[f64])> = frame
        .calls_of(ShapeKind::Rect)
        .enumerate()
        .filter(|(_, c)| c.args.len() >= 4 && c.args.iter().all(|v| v.is_finite()))
        .map(|(i, c)| (i, c.args.as_slice()))
        .collect();
    let mut best: Option<((f64, bool), (usize, usize))> = None;
    for (li, l) in &rects {
        for (ri, r) in &rects {
            if li == ri {
                continue;
            }
            let error = [
                l[0].abs(),
                l[1].abs(),
                (r[0] - (width - r[2])).abs(),
                (r[1] - (height - r[3])).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            let key = (error, !(l[2] == r[2] && l[3] == r[3]));
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, (*li, *ri)));
            }
        }
    }
    best.map(|(_, pair)| pair)
}

fn bind_score(
    sketch: &Sketch,
    frames: &[Frame],
    mutable: &BTreeSet<String>,
    role: Role,
    width: f64,
) -> Option<EntityBinding> {
    let first = frames.first()?;
    let half = width / 2.0;
    let ordinal = first.calls_of(ShapeKind::Text).position(|c| match c.args.get(1) {
        Some(x) if role == Role::LeftScore => *x < half,
        Some(x) => *x > half,
        None => false,
    })?;
    let mut b = EntityBinding::new(role, ShapeKind::Text, ordinal);
    let vars = names(sketch, arg_prov(frames, ShapeKind::Text, ordinal, 0));
    let numeric = |n: &&String| first.snapshot.contains_key(*n);
    b.value_var = vars
        .iter()
        .filter(numeric)
        .find(|n| mutable.contains(*n))
        .or_else(|| vars.iter().find(numeric))
        .cloned();
    Some(b)
}

/// Binds the ball, paddles and scores from a baseline trace. Roles that
/// cannot be bound are left out.
pub fn identify_entities(
    sketch: &Sketch,
    frames: &[Frame],
    width: f64,
    height: f64,
    mutable: &BTreeSet<String>,
    velocity: &[VelocityPair],
) -> Vec<EntityBinding> {
    let mut out = Vec::new();
    out.extend(bind_ball(sketch, frames, mutable, velocity));
    if let Some(first) = frames.first() {
        if let Some((l, r)) = bind_paddles(first, width, height) {
            for (role, ord) in [(Role::LeftPaddle, l), (Role::RightPaddle, r)] {
                let mut b = EntityBinding::new(role, ShapeKind::Rect, ord);
                let vars = |arg| -> BTreeSet<String> {
                    names(sketch, arg_prov(frames, ShapeKind::Rect, ord, arg))
                        .into_iter()
                        .filter(|n| mutable.contains(n))
                        .collect()
                };
                b.x_vars = vars(0);
                b.y_vars = vars(1);
                out.push(b);
            }
        }
    }
    for role in [Role::LeftScore, Role::RightScore] {
        out.extend(bind_score(sketch, frames, mutable, role, width));
    }
    out
}
