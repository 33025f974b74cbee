//! Criterion benchmarks for `coordsum-core` live under `benches/`.
