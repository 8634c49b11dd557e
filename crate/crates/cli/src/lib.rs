//! Command-line workflows over `slowlight-core`: closed-form sweeps, KK
//! reconstruction, FD/TD propagation, control-intensity scans and
//! cross-correlation analysis.

pub mod commands;
pub mod config;
pub mod summary;

use std::fmt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(slowlight_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<slowlight_core::Error> for CliError {
    fn from(e: slowlight_core::Error) -> Self {
        CliError::Core(e)
    }
}
