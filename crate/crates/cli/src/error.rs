use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] kpzlab_core::Error),
    /// A core error raised while evaluating at one parameter value.
    #[error("at {name} = {value}: {source}")]
    AtParameter { name: &'static str, value: f64, source: kpzlab_core::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Core(_) | Self::AtParameter { .. } => "domain",
            Self::Config(_) => "config",
            Self::Io { .. } => "io",
        }
    }

    /// The error document written to stderr.
    pub fn to_json(&self) -> Value {
        let mut error = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let Self::AtParameter { name, value, .. } = self {
            error["parameter"] = json!({ "name": name, "value": value });
        }
        json!({ "error": error })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn io_error(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}
