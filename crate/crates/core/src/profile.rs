//! Incremental profiling: versioned snapshots updated from behavior deltas
//! under a hybrid event/time trigger.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::curate::{
    check_conflicts, extract_composite, render_output, render_summary, rule_label, AtomicProfile, RuleSet, Schema,
    Value, ValueSpace,
};
use crate::date::{days_between, Date};
use crate::semantize::{parse_mub, CompressionReport, MubRecord, SemantizeError};
use crate::text::count_tokens;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("update rejected: {0}")]
    Rejected(String),
    #[error("trigger: {0}")]
    Trigger(String),
    #[error(transparent)]
    Mub(#[from] SemantizeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSnapshot {
    pub user_id: String,
    pub summary: String,
    pub atomic: AtomicProfile,
    pub as_of: Date,
    pub version: u64,
}

impl ProfileSnapshot {
    /// Version 0: nothing known yet.
    pub fn empty(user_id: &str, as_of: Date, schema: &Schema) -> Self {
        let atomic = AtomicProfile::all_na(schema);
        Self {
            user_id: user_id.into(),
            summary: render_summary(&atomic, schema),
            atomic,
            as_of,
            version: 0,
        }
    }
}

/// A non-behavioral account signal, such as a shipping-address change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountEvent {
    pub timestamp: Date,
    pub tag: String,
}

pub const SHIPPING_ADDRESS_CHANGE: &str = "shipping-address-change";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriggerKind {
    Event,
    Time,
    /// Either condition fires.
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateTrigger {
    pub kind: TriggerKind,
    pub event_tags: BTreeSet<String>,
    pub period_days: u32,
}

impl Default for UpdateTrigger {
    fn default() -> Self {
        Self {
            kind: TriggerKind::Hybrid,
            event_tags: [SHIPPING_ADDRESS_CHANGE.to_string()].into(),
            period_days: 7,
        }
    }
}

impl UpdateTrigger {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.kind != TriggerKind::Event && self.period_days < 1 {
            return Err(ProfileError::Trigger("time trigger period must be at least one day".into()));
        }
        Ok(())
    }
}

/// Fires on a watched event tag, or once `period_days` have elapsed since
/// the snapshot (the boundary day included).
pub fn should_update(snapshot: &ProfileSnapshot, events: &[AccountEvent], trigger: &UpdateTrigger, now: Date) -> bool {
    let by_event = trigger.kind != TriggerKind::Time && events.iter().any(|e| trigger.event_tags.contains(&e.tag));
    let by_time =
        trigger.kind != TriggerKind::Event && days_between(snapshot.as_of, now) >= i64::from(trigger.period_days);
    by_event || by_time
}

/// Summary_t = f(Summary_{t-1}, delta_t). Returns output text under the
/// answer grammar, carrying the full atomic profile and the summary.
pub trait Summarizer {
    fn summarize(&self, previous: &ProfileSnapshot, delta: &[MubRecord]) -> Result<String, String>;
}

/// Labels the delta with the rule set and merges the labels into the
/// previous profile. A new value that would contradict the rest of the
/// profile is held back; held values are retried until nothing changes, so
/// a consistent profile stays consistent.
#[derive(Debug, Clone)]
pub struct TemplateSummarizer {
    pub schema: Schema,
    pub rules: RuleSet,
}

impl TemplateSummarizer {
    pub fn new(schema: Schema) -> Self {
        Self {
            schema,
            rules: RuleSet::default(),
        }
    }

    pub fn merge(&self, previous: &AtomicProfile, delta: &[MubRecord]) -> AtomicProfile {
        let fresh = rule_label(delta, &self.rules, &self.schema);
        let mut out = previous.clone().completed(&self.schema);
        let mut pending: Vec<(&str, Value)> = Vec::new();
        for spec in &self.schema.attributes {
            let Value::Known(new) = fresh.get(&spec.id) else { continue };
            let merged = match (&spec.space, out.get(&spec.id)) {
                (ValueSpace::OpenText, Value::Known(old)) => {
                    let mut parts: Vec<&str> = old.split(", ").collect();
                    for p in new.split(", ") {
                        if !parts.contains(&p) {
                            parts.push(p);
                        }
                    }
                    parts.join(", ")
                }
                _ => new.clone(),
            };
            pending.push((&spec.id, Value::Known(merged)));
        }
        loop {
            let before = pending.len();
            pending.retain(|(id, v)| {
                let mut trial = out.clone();
                trial.set(id, v.clone());
                if check_conflicts(&trial).is_empty() {
                    out = trial;
                    false
                } else {
                    true
                }
            });
            if pending.is_empty() || pending.len() == before {
                break;
            }
        }
        out
    }
}

impl Summarizer for TemplateSummarizer {
    fn summarize(&self, previous: &ProfileSnapshot, delta: &[MubRecord]) -> Result<String, String> {
        let merged = self.merge(&previous.atomic, delta);
        let summary = render_summary(&merged, &self.schema);
        let think = alloc::format!("merged {} new behavior records into version {}", delta.len(), previous.version);
        Ok(render_output(&think, &merged, Some(&summary)))
    }
}

/// One update step. The summarizer's output must parse, be schema-valid
/// and conflict-free, or the update is rejected and the caller keeps the
/// previous snapshot.
pub fn incremental_update(
    snapshot: &ProfileSnapshot,
    delta_mub: &str,
    summarizer: &dyn Summarizer,
    schema: &Schema,
) -> Result<ProfileSnapshot, ProfileError> {
    let delta = parse_mub(delta_mub)?;
    let text = summarizer.summarize(snapshot, &delta).map_err(ProfileError::Rejected)?;
    let atomic = extract_composite(&text, schema).map_err(|e| ProfileError::Rejected(e.to_string()))?;
    atomic.validate(schema).map_err(|e| ProfileError::Rejected(e.to_string()))?;
    if let Some(c) = check_conflicts(&atomic).first() {
        return Err(ProfileError::Rejected(alloc::format!("conflicting attributes ({})", c.rule)));
    }
    let summary = crate::curate::parse_answer(&text)
        .ok()
        .and_then(|a| a.summary().map(str::to_string))
        .unwrap_or_default();
    let as_of = delta.iter().map(|r| r.time_bucket.end()).fold(snapshot.as_of, Date::max);
    Ok(ProfileSnapshot {
        user_id: snapshot.user_id.clone(),
        summary,
        atomic,
        as_of,
        version: snapshot.version + 1,
    })
}

/// Applies the update only when the trigger fires; otherwise the snapshot
/// comes back unchanged.
pub fn maybe_update(
    snapshot: &ProfileSnapshot,
    delta_mub: &str,
    events: &[AccountEvent],
    trigger: &UpdateTrigger,
    now: Date,
    summarizer: &dyn Summarizer,
    schema: &Schema,
) -> Result<ProfileSnapshot, ProfileError> {
    trigger.validate()?;
    if !should_update(snapshot, events, trigger, now) {
        return Ok(snapshot.clone());
    }
    incremental_update(snapshot, delta_mub, summarizer, schema)
}

/// Token reduction from a raw behavior context to the snapshot summary.
pub fn summary_compression(context_tokens: usize, snapshot: &ProfileSnapshot) -> Result<CompressionReport, SemantizeError> {
    crate::semantize::report::report_from_counts(context_tokens, count_tokens(&snapshot.summary))
}
