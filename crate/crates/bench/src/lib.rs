//! Criterion benchmarks for the simulation kernels; see `benches/kernels.rs`.
//! Run with `cargo bench -p hdsim-bench`.
