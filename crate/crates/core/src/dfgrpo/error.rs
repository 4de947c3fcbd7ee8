use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrpoError {
    #[error("config: {0}")]
    Config(String),
    #[error("non-finite ratio for output {output} of group {group}")]
    NonFiniteRatio { group: String, output: usize },
    #[error("update rejected: non-finite parameters")]
    NonFiniteUpdate,
    #[error("toy policy: {0}")]
    Policy(String),
}
