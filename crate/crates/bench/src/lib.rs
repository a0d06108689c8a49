//! Criterion benchmarks for combobench; see `benches/`.
