//! Benchmark-only crate; see `benches/link.rs`.
