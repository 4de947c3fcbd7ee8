//! Evaluation estimators and text metrics.

pub mod bleu;
pub mod error;
pub mod grounding;
pub mod passk;
pub mod report;
pub mod similarity;

pub use bleu::{bleu_n, modified_precision};
pub use error::MetricError;
pub use grounding::{grounding_eval, summary_eval, Grounding, SummaryEval};
pub use passk::{avg_at_k, mean_pass_at_k, pass_at_k, TrialRecord};
pub use report::{dimension_report, DimensionRow, EvalReport};
pub use similarity::{similarity, Similarity, TokenCosine, DEFAULT_TAU};
