use alloc::string::String;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::error::SemantizeError;
use crate::sim::types::{BehaviorEvent, BehaviorTrace};
use crate::text::count_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub raw_tokens: usize,
    pub mub_tokens: usize,
    pub reduction_ratio: f64,
}

impl CompressionReport {
    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        alloc::format!(
            "raw_tokens={}\nmub_tokens={}\nreduction_ratio={:.6}\n",
            self.raw_tokens, self.mub_tokens, self.reduction_ratio
        )
    }
}

/// The raw log line an event is counted as.
pub fn raw_log_line(e: &BehaviorEvent) -> String {
    alloc::format!("{} {} {} {}", e.timestamp, e.platform, e.action_type, e.entity.title)
}

/// The raw event log, one line per event, noise included.
pub fn raw_log_text(trace: &BehaviorTrace) -> String {
    let mut s = String::new();
    for e in &trace.events {
        let _ = writeln!(s, "{}", raw_log_line(e));
    }
    s
}

pub fn compression_report(raw_text: &str, mub_text: &str) -> Result<CompressionReport, SemantizeError> {
    report_from_counts(count_tokens(raw_text), count_tokens(mub_text))
}

pub fn report_from_counts(raw_tokens: usize, mub_tokens: usize) -> Result<CompressionReport, SemantizeError> {
    if raw_tokens == 0 {
        return Err(SemantizeError::UndefinedRatio);
    }
    Ok(CompressionReport {
        raw_tokens,
        mub_tokens,
        reduction_ratio: 1.0 - mub_tokens as f64 / raw_tokens as f64,
    })
}
