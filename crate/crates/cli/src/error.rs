use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const INTEGRATION: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown scenario `{0}` (see `qbattery list`)")]
    UnknownScenario(String),
}

impl ConfigError {
    /// Dotted path of the offending field, if any.
    pub fn path(&self) -> Option<&str> {
        match self {
            ConfigError::Schema { path, .. } | ConfigError::Invalid { path, .. } => Some(path),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("integration failed at {job}: {source}")]
    Integration {
        job: String,
        source: qbattery_core::Error,
    },
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => exit::CONFIG,
            RunError::Integration { .. } => exit::INTEGRATION,
            RunError::Io(_) => exit::INTEGRATION,
        }
    }
}
