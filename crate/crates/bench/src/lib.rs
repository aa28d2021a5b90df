//! Benchmark-only crate; the measurements live in `benches/checks.rs`.
