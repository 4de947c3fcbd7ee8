use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurateError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("extraction failed: {0}")]
    Extraction(String),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("sampling: {0}")]
    Sampling(String),
    #[error("annotator: {0}")]
    Annotator(String),
    #[error("rule set: {0}")]
    Rules(String),
}
