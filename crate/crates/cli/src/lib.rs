//! Library behind the `aqec` binary: configuration, experiment runner,
//! results files and figures.

use std::fmt;

pub mod cli;
pub mod config;
pub mod report;
pub mod results;
pub mod run;
pub mod svg;

/// Failures mapped to process exit codes: 1 for configuration and input
/// errors, 2 for errors while running.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
