//! Experiment harness around `sublin-core`: graph files, run configuration, reports,
//! size sweeps and the invariant battery behind the `sublin` binary.

pub mod config;
pub mod estimate;
pub mod io;
pub mod plot;
pub mod report;
pub mod stats;
pub mod sweep;
pub mod verify;
