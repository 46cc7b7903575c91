//! Benchmark harness crate; see `benches/inference.rs`.
