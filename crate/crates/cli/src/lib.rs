//! Experiment runner behind the `h1spec` binary: TOML configs in, CSV tables
//! and JSON manifests out.

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command};
pub use config::{parse_config, parse_config_str, Config};
pub use error::{CliError, CliResult};
