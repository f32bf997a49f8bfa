//! Criterion benchmarks for the f2lab kernels; see `benches/kernels.rs`.
