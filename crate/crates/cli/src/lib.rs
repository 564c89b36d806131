//! Command-line front end: CSV loading, dataset generation, workload scripts,
//! benchmarking and an interactive shell.

pub mod bench;
pub mod csvio;
pub mod datagen;
pub mod repl;
pub mod scaling;
pub mod workload;
