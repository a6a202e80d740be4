//! Criterion benchmarks for the shadowlab kernels; see `benches/kernels.rs`.
