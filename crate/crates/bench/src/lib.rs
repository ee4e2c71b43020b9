//! Criterion benchmarks for the `ifsquad` rules; see `benches/rules.rs`.
//!
//! Run with `cargo bench -p ifsquad-bench`.
