//! Command line front end for `boundwealth`, driven by TOML scenario files.

pub mod commands;
pub mod config;
pub mod error;

pub use config::ScenarioFile;
pub use error::CliError;
