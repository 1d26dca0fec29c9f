//! Criterion benchmarks for magtorus-core; see `benches/`.
