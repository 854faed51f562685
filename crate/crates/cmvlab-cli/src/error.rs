use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// A config that cannot be run as written.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config is not valid JSON (line {line}, column {column}): {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("missing required fields: {}", fields.join(", "))]
    Missing { fields: Vec<String> },

    #[error("at `{path}`: {message}")]
    Invalid { path: String, message: String },

    #[error("cannot read {}: {message}", path.display())]
    Read { path: PathBuf, message: String },
}

impl ConfigError {
    /// Path of the offending field, when there is one.
    pub fn field_path(&self) -> Option<String> {
        match self {
            ConfigError::Invalid { path, .. } => Some(path.clone()),
            ConfigError::Missing { fields } => Some(fields.join(",")),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{command}: {source}")]
    Library {
        command: String,
        #[source]
        source: cmvlab::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const MODEL: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Library { source, .. } if source.is_model_violation() => exit::MODEL,
            CliError::Library { .. } => exit::NUMERICAL,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            exit::CONFIG => "config",
            exit::MODEL => "model-violation",
            exit::NUMERICAL => "numerical",
            _ => "io",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord {
            status: "error",
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            command: match self {
                CliError::Library { command, .. } => Some(command.clone()),
                _ => None,
            },
            field: match self {
                CliError::Config(c) => c.field_path(),
                _ => None,
            },
            tool_version: crate::TOOL_VERSION,
        }
    }
}

/// Machine-readable description of a failed run, written as error.json.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub status: &'static str,
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub tool_version: &'static str,
}
