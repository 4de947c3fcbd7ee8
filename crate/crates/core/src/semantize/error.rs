use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemantizeError {
    #[error("line {line}: {message}")]
    MubParse { line: usize, message: String },
    #[error("reduction ratio is undefined for an empty raw log")]
    UndefinedRatio,
    #[error("invalid MUB record: {0}")]
    InvalidRecord(String),
}
