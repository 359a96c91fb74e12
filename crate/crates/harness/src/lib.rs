//! Experiment harness for the `dasim-core` double-auction simulator:
//! TOML experiment configs, replicated runs with CSV and SVG output, and
//! the drivers behind the `dasim` command-line tool.

pub mod analysis;
pub mod config;
pub mod error;
mod output;
pub mod run;
pub mod svg;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use error::HarnessError;
pub use run::{run_experiment, simulate};
