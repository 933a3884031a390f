//! Benchmark problems, reports and the problem/sweep file formats of the
//! `beam` command-line tool.

pub mod benchmarks;
pub mod oracles;
pub mod problem;
pub mod report;
pub mod sweep;

pub use mixbeam;
