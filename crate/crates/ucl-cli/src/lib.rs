//! Library surface of the `ucl` command-line tool: the lint rule catalog,
//! paired corpus statistics, and report assembly. The binary in `main.rs`
//! is a thin argument-parsing layer over these.

pub mod lint;
pub mod report;
pub mod stats;
