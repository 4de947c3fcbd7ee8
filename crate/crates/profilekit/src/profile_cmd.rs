//! One incremental update against a snapshot file.

use std::fmt;
use std::path::Path;

use profilekit_core::curate::Schema;
use profilekit_core::date::Date;
use profilekit_core::profile::{
    incremental_update, maybe_update, AccountEvent, ProfileError, ProfileSnapshot, TemplateSummarizer, UpdateTrigger,
};
use profilekit_core::semantize::parse_mub;

use crate::error::{config_err, stage_err, Result};
use crate::io::{read_jsonl, read_text};
use crate::snapshots;

const STAGE: &str = "update";

pub struct UpdateRequest<'a> {
    pub snapshot: &'a Path,
    pub delta: &'a Path,
    pub events: Option<&'a Path>,
    pub now: Date,
    /// Owner of a snapshot file that does not exist yet.
    pub user: &'a str,
    pub trigger: &'a UpdateTrigger,
    pub schema: &'a Schema,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateOutcome {
    Applied { version: u64, as_of: Date },
    /// The trigger did not fire; the file is untouched.
    NotTriggered { version: u64 },
}

impl fmt::Display for UpdateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Applied { version, as_of } => write!(f, "applied version={version} as_of={as_of}"),
            Self::NotTriggered { version } => write!(f, "not triggered version={version}"),
        }
    }
}

/// Applies the delta when the trigger fires. A user without a snapshot gets
/// an empty version 0 followed by an unconditional first update. A rejected
/// update is a stage failure and leaves the file as it was.
pub fn update_file(req: &UpdateRequest<'_>) -> Result<UpdateOutcome> {
    let delta = read_text(req.delta).map_err(|e| stage_err(STAGE, e))?;
    let events: Vec<AccountEvent> = match req.events {
        Some(p) => read_jsonl(p).map_err(config_err)?,
        None => Vec::new(),
    };
    let summarizer = TemplateSummarizer::new(req.schema.clone());
    let reject = |e: ProfileError| stage_err(STAGE, e);
    let (prev, next) = match snapshots::latest(req.snapshot).map_err(|e| stage_err(STAGE, e))? {
        Some(prev) => {
            let next = maybe_update(&prev, &delta, &events, req.trigger, req.now, &summarizer, req.schema)
                .map_err(reject)?;
            (prev, next)
        }
        None => {
            let records = parse_mub(&delta).map_err(|e| stage_err(STAGE, e))?;
            let start = records.iter().map(|r| r.time_bucket.start()).min().unwrap_or(req.now);
            let base = ProfileSnapshot::empty(req.user, start, req.schema);
            let next = incremental_update(&base, &delta, &summarizer, req.schema).map_err(reject)?;
            snapshots::append(req.snapshot, &base).map_err(|e| stage_err(STAGE, e))?;
            (base, next)
        }
    };
    if next.version == prev.version {
        return Ok(UpdateOutcome::NotTriggered { version: prev.version });
    }
    snapshots::append(req.snapshot, &next).map_err(|e| stage_err(STAGE, e))?;
    Ok(UpdateOutcome::Applied {
        version: next.version,
        as_of: next.as_of,
    })
}
