//! Scenario runner for laxlab: TOML configs, presets, subcommands and
//! report files.

pub mod config;
pub mod run;

pub use config::{emit, load, parse_config, ConfigError, Overrides, ScenarioConfig};
pub use run::{RunError, EXIT_BLOWUP, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK};
