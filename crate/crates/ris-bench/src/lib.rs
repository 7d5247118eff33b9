//! Benchmark-only crate; see `benches/ris_benches.rs`.
