//! Curriculum data curation: rule pseudo-labels, low-entropy filtering and
//! the three consensus-based stage datasets, over pluggable teachers and
//! extractors.

pub mod annotate;
pub mod answer;
pub mod error;
pub mod question;
pub mod rules;
pub mod sample;
pub mod schema;
pub mod stages;
pub mod truth;

pub use annotate::{
    Annotator, AnnotatorOutput, CompositeSynth, MockConfig, MockOverride, MockSource, MockTeacher, Resynthesizer,
    Synthesizer,
};
pub use answer::{
    extract_atomic, extract_composite, extract_from_summary, parse_answer, render_output, render_summary, Answer,
    AtomicExtractor, CompositeExtractor, Extractor, SummaryExtractor, SUMMARY_KEY,
};
pub use error::CurateError;
pub use question::{atomic_questions, composite_question, Question};
pub use rules::{check_conflicts, rule_label, Conflict, Evidence, LabelRule, RuleSet};
pub use sample::{stratified_sample, StratumShare};
pub use schema::{AtomicProfile, AttributeSpec, Dimension, Matcher, Schema, Value, ValueSpace};
pub use stages::{
    build_stage1, build_stage2, build_stage3, filter_low_entropy, stage1_accepts, stage2_accepts, stage2_subset,
    CurationConfig, DatasetRecord, Judge, Sample, Stage, Stage1, StageDataset,
};
pub use truth::persona_profile;
