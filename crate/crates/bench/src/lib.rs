//! Criterion benchmarks for `kptrop-core`; see `benches/`.
