//! Runner, file formats, parallel drivers and an exact-diagonalization
//! oracle around `echolab-core`.

pub mod config;
pub mod drivers;
pub mod ed;
pub mod error;
pub mod io;
pub mod manifest;
pub mod recipes;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, LabResult};
pub use manifest::Manifest;
pub use runner::{run, RunOptions, RunOutcome};
