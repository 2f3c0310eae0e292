//! Criterion benchmarks for the detfree kernels; see `benches/`.
