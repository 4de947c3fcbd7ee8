use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("population alignment failed, source pool has no personas for strata: {}", .0.join(", "))]
    Alignment(Vec<String>),
    #[error("horizon must be at least one day")]
    EmptyHorizon,
}

pub(crate) fn config_err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}
