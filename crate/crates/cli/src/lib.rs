//! Library half of the command-line front end: configuration schema, CSV
//! and SVG writers, and the per-subcommand drivers. The `cqad` binary is a
//! thin argument-parsing wrapper over [`commands`].

pub mod commands;
pub mod config;
pub mod csvio;
pub mod svg;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    /// Configuration or schema problem; exit code 2.
    Config,
    /// Anything that failed after validation; exit code 1.
    Runtime,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: String) -> Self {
        CliError {
            kind: ErrorKind::Config,
            message,
        }
    }

    pub fn runtime(message: String) -> Self {
        CliError {
            kind: ErrorKind::Runtime,
            message,
        }
    }

    /// Core validation failures surfaced while building the device are
    /// configuration problems.
    pub fn from_config_error(e: cqad_core::Error) -> Self {
        CliError::config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Runtime => 1,
        }
    }

    /// Machine-readable form for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| {
            format!("{{\"kind\":\"runtime\",\"message\":\"{}\"}}", self.message)
        })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<cqad_core::Error> for CliError {
    fn from(e: cqad_core::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}
