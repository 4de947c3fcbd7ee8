//! Data-centric semantization: raw event logs to MUB text.
//!
//! Stages, in order: refine each entity to a core noun phrase plus at most
//! three modifiers, filter non-informative entities, aggregate events into
//! (time bucket, platform, action) cells with coarse buckets for old
//! history, keep only the most salient categories of each cell, and
//! serialize one MUB line per cell.

pub mod aggregate;
pub mod compress;
pub mod entity;
pub mod error;
pub mod filter;
pub mod lexicon;
pub mod mub;
pub mod pipeline;
pub mod refine;
pub mod report;

pub use aggregate::{aggregate, AggregationPolicy, Cell, Granularity, Taxonomy, TimeBucket};
pub use compress::compress_salience;
pub use entity::{Entity, EntityStore, KnowledgeBase, RefinedEntity};
pub use error::SemantizeError;
pub use filter::{filter_entities, FilterConfig};
pub use lexicon::Lexicon;
pub use mub::{parse_mub, serialize_mub, MubRecord};
pub use pipeline::{semantize_trace, Semantized, Semantizer, StageTokens};
pub use refine::{Refiner, RuleRefiner};
pub use report::{compression_report, CompressionReport};
