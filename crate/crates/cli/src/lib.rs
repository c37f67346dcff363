//! Experiment runner for the `causalthermo` binary: configuration, grid
//! sweeps, CSV output and plot scripts.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod sweep;

pub use config::{Experiment, SweepConfig};
pub use error::CliError;
pub use sweep::{run_sweep, SweepRow};
