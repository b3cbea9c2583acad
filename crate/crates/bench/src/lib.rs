//! Criterion benchmarks for the grader; see `benches/grading.rs`.
