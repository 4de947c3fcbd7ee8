//! The run manifest: one JSON line per artifact and one per stage.
//!
//! Artifact lines carry `{stage, path, hash, duration_ms}` with `hash` the
//! sha256 of the file contents. Stage lines carry the stage status, its
//! error if it failed, and audit metrics such as compression ratios.
//! Durations are wall-clock; everything else is a function of config and
//! seed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::io::{parse_jsonl, to_jsonl, IoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub stage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hash: Option<String>,
    pub duration_ms: u64,
    /// Present on stage lines only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl ManifestEntry {
    pub fn artifact(stage: &str, path: String, hash: String, duration_ms: u64) -> Self {
        Self {
            stage: stage.into(),
            path: Some(path),
            hash: Some(hash),
            duration_ms,
            status: None,
            error: None,
            metrics: BTreeMap::new(),
        }
    }

    pub fn stage(stage: &str, status: Status, duration_ms: u64) -> Self {
        Self {
            stage: stage.into(),
            path: None,
            hash: None,
            duration_ms,
            status: Some(status),
            error: None,
            metrics: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        to_jsonl(&self.entries)
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(Self {
            entries: parse_jsonl(text, "manifest")?,
        })
    }

    pub fn status_of(&self, stage: &str) -> Option<Status> {
        self.entries.iter().find(|e| e.stage == stage && e.status.is_some()).and_then(|e| e.status)
    }

    pub fn failed(&self) -> bool {
        self.entries.iter().any(|e| e.status == Some(Status::Failed))
    }

    /// `(stage, path, hash)` for every artifact.
    pub fn artifacts(&self) -> Vec<(&str, &str, &str)> {
        self.entries
            .iter()
            .filter_map(|e| Some((e.stage.as_str(), e.path.as_deref()?, e.hash.as_deref()?)))
            .collect()
    }

    /// The manifest with durations zeroed: equal across reruns of the same
    /// config and seed.
    pub fn without_durations(&self) -> Self {
        let mut m = self.clone();
        for e in &mut m.entries {
            e.duration_ms = 0;
        }
        m
    }

    pub fn metric(&self, stage: &str, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.stage == stage && e.status.is_some())
            .and_then(|e| e.metrics.get(name).copied())
    }
}
