//! Command-line front end, configuration files and output formats for
//! [`malthus_core`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod format;
pub mod manifest;

pub use error::{CliError, CliResult};
