//! Criterion benchmarks for the propagation kernels; see `benches/`.
