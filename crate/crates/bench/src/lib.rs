//! Criterion benchmarks for wmflat; see `benches/`.
