//! Deterministic execution of sketches, frame by frame.

pub mod interp;
pub mod trace;
pub mod value;
pub mod velocity;

pub use interp::{Allowance, BudgetScope, InputEvent, RunConfig, RunError, RunResult, Runtime};
pub use trace::{frames_to_json_lines, DrawCall, Frame};
pub use value::{Prov, Tracked, Value};
pub use velocity::{find_velocity_vars, VelocityPair};
