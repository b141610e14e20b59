//! Criterion benchmarks for the core crate; see `benches/weyl.rs`.
