use std::fmt::Display;

/// Everything the CLI can fail with, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Unreadable, malformed or invalid configuration.
    #[error("config: {0}")]
    Config(String),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Stage { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn config_err(m: impl Display) -> Error {
    Error::Config(m.to_string())
}

pub fn stage_err(stage: &str, m: impl Display) -> Error {
    Error::Stage {
        stage: stage.to_string(),
        message: m.to_string(),
    }
}
