//! Command-line front end for the prescribed-curvature workbench.

pub mod config;
pub mod expr;
pub mod pipeline;

use std::fmt;

/// Failures, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Config(String),
    /// Numerical or internal failure: exit code 3.
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Solver(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "configuration",
            Self::Solver(_) => "solver",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Solver(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}
