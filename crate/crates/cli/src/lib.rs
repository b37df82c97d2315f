//! Configuration, scenario runners and CSV output for the `spinbath` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{execute, run, Command};
pub use config::RunConfig;
pub use error::CliError;
