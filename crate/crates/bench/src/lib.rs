//! Criterion benchmarks for qauth-core; see `benches/`.
