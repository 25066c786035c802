//! Criterion benchmarks for the histnero pipeline; see `benches/pipeline.rs`.
