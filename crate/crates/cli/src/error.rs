use h1spec_core::Error as CoreError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("numerical failure: {source}")]
    Numerical { source: CoreError },

    #[error("invariant check failed: {}", .failed.join(", "))]
    CheckFailed { failed: Vec<String> },

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps a module error raised while running the `field` section.
    /// Errors caused by the inputs become validation errors.
    pub fn from_core(field: &str, e: CoreError) -> Self {
        use CoreError::*;
        match e {
            OverlappingSegments { .. }
            | NonIntegrableTau { .. }
            | SigmaNotLocallyL2 { .. }
            | InvalidParams(_)
            | NonDifferentiableTheta(_)
            | OutOfRange { .. }
            | NotUpperHalfPlane
            | PositionsNotSparse { .. }
            | DecayViolated(_)
            | EmptyResult => CliError::validation(field, e.to_string()),
            _ => CliError::Numerical { source: e },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Parse { .. } | CliError::Validation { .. } => 2,
            CliError::Numerical { .. } | CliError::CheckFailed { .. } => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Numerical { .. } => "numerical",
            CliError::CheckFailed { .. } => "check_failed",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            CliError::Parse { line, .. } => v["line"] = json!(line),
            CliError::Validation { field, .. } => v["field"] = json!(field),
            CliError::Numerical { source } => {
                let dbg = format!("{source:?}");
                let name = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("");
                v["variant"] = json!(name);
            }
            CliError::CheckFailed { failed } => v["failed"] = json!(failed),
            _ => {}
        }
        json!({ "error": v })
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
