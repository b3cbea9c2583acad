use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::sketch::parser::local_names;
use crate::sketch::{Block, ExprKind, FunctionDef, Sketch, StmtKind};

/// Callbacks Processing invokes repeatedly after setup.
pub const EVENT_HANDLERS: &[&str] = &[
    "mousePressed",
    "mouseReleased",
    "mouseClicked",
    "mouseDragged",
    "mouseMoved",
    "mouseWheel",
    "keyPressed",
    "keyReleased",
    "keyTyped",
];

/// Every callee named in `block`, in order of first appearance.
pub fn callees(block: &Block) -> Vec<&str> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    block.walk_exprs(&mut |e| {
        if let ExprKind::Call { callee, .. } = &e.kind {
            if seen.insert(callee.as_str()) {
                out.push(callee.as_str());
            }
        }
    });
    out
}

/// User functions reachable from `roots`, roots first, breadth-first.
pub fn reachable<'a>(sketch: &'a Sketch, roots: &[&str]) -> Vec<&'a FunctionDef> {
    let mut seen = HashSet::new();
    let mut queue: VecDeque<&str> = roots.iter().copied().collect();
    let mut out = Vec::new();
    while let Some(name) = queue.pop_front() {
        let Some(f) = sketch.function(name) else {
            continue;
        };
        if !seen.insert(f.name.as_str()) {
            continue;
        }
        out.push(f);
        queue.extend(callees(&f.body));
    }
    out
}

/// Names assigned or incremented anywhere in `block`, loop headers included.
pub fn assigned_names(block: &Block) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    block.walk(&mut |s| match &s.kind {
        StmtKind::Assign { target, .. } | StmtKind::IncDec { target, .. } => {
            out.insert(target.clone());
        }
        _ => {}
    });
    out
}

/// Globals written by `f` itself, ignoring names it shadows with locals.
pub fn assigned_globals(sketch: &Sketch, f: &FunctionDef) -> BTreeSet<String> {
    let locals = local_names(f);
    assigned_names(&f.body)
        .into_iter()
        .filter(|n| !locals.contains(n.as_str()) && sketch.global(n).is_some())
        .collect()
}

/// Globals written by any function reachable from `roots`.
pub fn globals_written_from(sketch: &Sketch, roots: &[&str]) -> BTreeSet<String> {
    reachable(sketch, roots)
        .into_iter()
        .flat_map(|f| assigned_globals(sketch, f))
        .collect()
}

/// Globals that change after setup: written by draw, an event handler, or
/// anything they call.
pub fn mutable_globals(sketch: &Sketch) -> BTreeSet<String> {
    let mut roots = vec!["draw"];
    roots.extend_from_slice(EVENT_HANDLERS);
    globals_written_from(sketch, &roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::parse_source;
    use crate::source::SourceFile;

    #[test]
    fn reachability_and_mutation() {
        let src = "float x; float y; float k;\n\
                   void setup(){ init(); }\n\
                   void init(){ k = 3; }\n\
                   void draw(){ step(); }\n\
                   void step(){ float y = 2; y = 3; x = x + 1; }\n\
                   void unused(){ k = 9; }";
        let (sketch, _) = parse_source(SourceFile::new("t.pde", src));
        let names: Vec<_> = reachable(&sketch, &["draw"]).iter().map(|f| f.name.clone()).collect();
        assert_eq!(names, ["draw", "step"]);
        let m = mutable_globals(&sketch);
        assert_eq!(m.into_iter().collect::<Vec<_>>(), ["x"]);
    }
}
