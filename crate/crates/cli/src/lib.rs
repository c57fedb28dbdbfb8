//! Experiment runners for the `greencache` command-line tool: sweeps that
//! regenerate the APC and EE curves, optimizer reports and Monte Carlo
//! validation of the analytic model.

pub mod config;
pub mod error;
pub mod experiments;
pub mod sweep;

pub use config::{Convention, ExperimentConfig, Kind};
pub use error::{ConfigError, EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION};
pub use experiments::{run, Format, Output};
pub use sweep::SweepResult;
