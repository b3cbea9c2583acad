use std::collections::BTreeSet;

use crate::sketch::parser::local_names;
use crate::sketch::{AssignOp, BinaryOp, ExprKind, Sketch, StmtKind};
use crate::static_checks::callgraph::reachable;

/// A global position updated by a global velocity every frame.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VelocityPair {
    pub position: String,
    pub velocity: String,
}

/// Finds `p = p + v`, `p = p - v`, `p = v + p`, `p += v` and `p -= v` in
/// draw() and everything it calls, where `p` and `v` are distinct globals.
pub fn find_velocity_vars(sketch: &Sketch) -> Vec<VelocityPair> {
    let mut out = BTreeSet::new();
    for f in reachable(sketch, &["draw"]) {
        let locals = local_names(f);
        let is_global = |n: &str| !locals.contains(n) && sketch.global(n).is_some();
        f.body.walk(&mut |s| {
            let StmtKind::Assign { target, op, value } = &s.kind else {
                return;
            };
            let velocity = match (op, &value.kind) {
                (AssignOp::Add | AssignOp::Sub, ExprKind::Ident(v)) => Some(v.as_str()),
                (
                    AssignOp::Set,
                    ExprKind::Binary {
                        op: bop @ (BinaryOp::Add | BinaryOp::Sub),
                        lhs,
                        rhs,
                    },
                ) => match (lhs.as_ident(), rhs.as_ident()) {
                    (Some(l), Some(r)) if l == target => Some(r),
                    (Some(l), Some(r)) if r == target && *bop == BinaryOp::Add => Some(l),
                    _ => None,
                },
                _ => None,
            };
            if let Some(v) = velocity {
                if v != target && is_global(target) && is_global(v) {
                    out.insert(VelocityPair {
                        position: target.clone(),
                        velocity: v.to_string(),
                    });
                }
            }
        });
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_source;
    use crate::source::SourceFile;

    #[test]
    fn recognised_patterns() {
        let src = "float x, y, z, w, q, vx, vy, vz, vw, vq;\n\
                   void draw(){ x = x + vx; y = vy + y; move(); q = vq - q; }\n\
                   void move(){ z += vz; w -= vw; float vx = 1; x = x + vx; }";
        let (s, _) = parse_source(SourceFile::new("t.pde", src));
        let pairs: Vec<(String, String)> = find_velocity_vars(&s)
            .into_iter()
            .map(|p| (p.position, p.velocity))
            .collect();
        let expect = [("w", "vw"), ("x", "vx"), ("y", "vy"), ("z", "vz")];
        assert_eq!(pairs, expect.map(|(a, b)| (a.to_string(), b.to_string())).to_vec());
    }
}
