//! Scenario files, subcommands and output writers of the `uavmac` binary.

pub mod app;
pub mod config;
pub mod output;

pub use app::{run, Cli};
pub use config::{load_config, parse_config, ConfigError, ScenarioConfig};
