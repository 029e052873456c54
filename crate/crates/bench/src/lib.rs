//! Criterion benchmarks for the hot paths: distance matrices, the
//! eigensolver, sinusoid fitting and zeta evaluation. Run with
//! `cargo bench -p zeta-mds-bench`.
