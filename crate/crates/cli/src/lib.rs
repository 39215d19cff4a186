//! Config parsing and run orchestration behind the `hexhand` binary.

pub mod config;
pub mod runner;

pub use config::{load_config, parse_config, render_config, ConfigError, ScenarioConfig};
pub use runner::{genmap, run, CliError, Mode, RunReport};
