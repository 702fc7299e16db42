//! Criterion benchmarks for selberg-core; see `benches/kernels.rs`.
