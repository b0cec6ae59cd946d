//! Criterion benchmarks for the `chaindesign` crate; see `benches/`.
