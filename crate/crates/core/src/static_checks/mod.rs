//! Checks and analyses that never execute the sketch.

pub mod callgraph;
pub mod checks;
pub mod env;
pub mod shapes;

pub use checks::*;
pub use env::{detect_screen, eval_static, resolve_bindings, Screen, ScreenSource, StaticEnv};
pub use shapes::{collect_shape_uses, ShapeKind, ShapeUse};
