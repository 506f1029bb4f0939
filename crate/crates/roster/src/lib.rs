//! File formats, solver processes, the benchmark harness and figures for
//! the rostering core in `roster_core`.

pub mod bench;
pub mod fuzz;
pub mod io;
pub mod runner;
pub mod svg;

pub use roster_core as core;
