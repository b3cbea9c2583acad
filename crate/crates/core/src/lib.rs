pub mod arith;
pub mod builtins;
pub mod check;
pub mod color;
pub mod corpus;
pub mod dynamic_checks;
pub mod pipeline;
pub mod rubric;
pub mod runtime;
pub mod sketch;
pub mod source;
pub mod static_checks;

pub use check::{CheckId, CheckResult, CheckStatus};
pub use pipeline::{BatchOptions, PipelineError, SubmissionManifest, SummaryRow};
pub use rubric::{grade, render_report, GradeReport, Rubric, RubricError};
pub use source::{SourceFile, Span};
