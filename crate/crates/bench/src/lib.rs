//! Criterion benchmarks for `weyllab-core`. See `benches/`.
