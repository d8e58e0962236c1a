use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Failures of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: malformed files, out-of-range parameters (exit 1).
    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A numerical check exceeded its tolerance (exit 2).
    #[error("{check} failed: {message}")]
    Numerical { check: String, message: String, details: Value },

    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation { field: field.into(), message: message.into() }
    }

    pub fn numerical(check: impl Into<String>, message: impl Into<String>, details: Value) -> Self {
        CliError::Numerical { check: check.into(), message: message.into(), details }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Prefixes the offending field with the enclosing key, e.g. `medium`.
    pub fn within(self, parent: &str) -> Self {
        match self {
            CliError::Validation { field, message } => {
                let field =
                    if field.is_empty() || field == "." { parent.to_string() } else { format!("{parent}.{field}") };
                CliError::Validation { field, message }
            }
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
        }
    }

    /// Machine-readable description written to standard error.
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Validation { field, message } => {
                json!({ "status": "error", "kind": "validation", "field": field, "message": message })
            }
            CliError::Numerical { check, message, details } => {
                json!({ "status": "error", "kind": "numerical", "check": check, "message": message, "details": details })
            }
            CliError::Io { path, source } => json!({
                "status": "error",
                "kind": "io",
                "field": path.display().to_string(),
                "message": source.to_string(),
            }),
        }
    }
}

impl From<polariton_core::Error> for CliError {
    fn from(e: polariton_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation { field: e.field().unwrap_or("input").to_string(), message: e.to_string() }
        } else {
            CliError::Numerical { check: "numerics".into(), message: e.to_string(), details: Value::Null }
        }
    }
}
