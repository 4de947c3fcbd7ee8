//! The MUB line grammar:
//!
//! ```text
//! [Platform] [TimeBucket] [Action] [Count] | item, item, ...
//! ```
//!
//! ` [Count]` appears only when the cell holds two or more events.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::aggregate::TimeBucket;
use super::error::SemantizeError;
use crate::sim::types::{ActionType, Platform};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MubRecord {
    pub platform: Platform,
    pub time_bucket: TimeBucket,
    pub behavior_type: ActionType,
    /// Raw event count of the cell after salience compression.
    pub frequency: Option<u32>,
    pub items: Vec<String>,
}

impl MubRecord {
    pub fn frequency_field(count: usize) -> Option<u32> {
        (count >= 2).then(|| u32::try_from(count).unwrap_or(u32::MAX))
    }

    pub fn validate(&self) -> Result<(), SemantizeError> {
        let bad = |m: String| Err(SemantizeError::InvalidRecord(m));
        if self.items.is_empty() {
            return bad("record has no items".into());
        }
        if matches!(self.frequency, Some(n) if n < 2) {
            return bad("frequency below 2 is written as absent".into());
        }
        for it in &self.items {
            let clean = !it.is_empty()
                && it.trim() == it
                && !it.contains([',', '|', '\n', '\r']);
            if !clean {
                return bad(alloc::format!("item {it:?} is not serializable"));
            }
        }
        Ok(())
    }

    fn order_key(&self) -> (TimeBucket, Platform, ActionType) {
        (self.time_bucket, self.platform, self.behavior_type)
    }

    pub fn line(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "[{}] [{}] [{}]", self.platform, self.time_bucket, self.behavior_type);
        if let Some(n) = self.frequency {
            let _ = write!(s, " [{n}]");
        }
        s.push_str(" | ");
        s.push_str(&self.items.join(", "));
        s
    }
}

/// Sorts newest first, then by platform and action.
pub fn sort_records(records: &mut [MubRecord]) {
    records.sort_by_key(MubRecord::order_key);
}

/// One newline-terminated line per record, in canonical order.
pub fn serialize_mub(records: &[MubRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = String::new();
    for r in &sorted {
        out.push_str(&r.line());
        out.push('\n');
    }
    out
}

fn bracket<'a>(rest: &mut &'a str, line: usize, what: &str) -> Result<&'a str, SemantizeError> {
    let err = |m: String| SemantizeError::MubParse { line, message: m };
    let body = rest
        .strip_prefix('[')
        .ok_or_else(|| err(alloc::format!("expected '[' before {what}")))?;
    let end = body
        .find(']')
        .ok_or_else(|| err(alloc::format!("unclosed {what}")))?;
    *rest = &body[end + 1..];
    Ok(&body[..end])
}

pub fn parse_line(text: &str, line: usize) -> Result<MubRecord, SemantizeError> {
    let err = |m: String| SemantizeError::MubParse { line, message: m };
    let mut rest = text;
    let p = bracket(&mut rest, line, "platform")?;
    let platform = Platform::parse(p).ok_or_else(|| err(alloc::format!("unknown platform {p:?}")))?;
    rest = rest.strip_prefix(' ').ok_or_else(|| err("expected space".into()))?;
    let b = bracket(&mut rest, line, "time bucket")?;
    let time_bucket = TimeBucket::parse(b).ok_or_else(|| err(alloc::format!("bad time bucket {b:?}")))?;
    rest = rest.strip_prefix(' ').ok_or_else(|| err("expected space".into()))?;
    let a = bracket(&mut rest, line, "behavior type")?;
    let behavior_type = ActionType::parse(a).ok_or_else(|| err(alloc::format!("unknown behavior {a:?}")))?;
    let mut frequency = None;
    if rest.starts_with(" [") {
        rest = &rest[1..];
        let n = bracket(&mut rest, line, "count")?;
        let ok = !n.is_empty() && n.bytes().all(|c| c.is_ascii_digit()) && !n.starts_with('0');
        let v: u32 = n
            .parse()
            .ok()
            .filter(|v| ok && *v >= 2)
            .ok_or_else(|| err(alloc::format!("bad count {n:?}")))?;
        frequency = Some(v);
    }
    let items = rest
        .strip_prefix(" | ")
        .ok_or_else(|| err("expected ' | ' before items".into()))?;
    let rec = MubRecord {
        platform,
        time_bucket,
        behavior_type,
        frequency,
        items: items.split(", ").map(ToString::to_string).collect(),
    };
    rec.validate().map_err(|e| err(e.to_string()))?;
    Ok(rec)
}

/// Parses MUB text; blank lines are ignored, line numbers are 1-based.
pub fn parse_mub(text: &str) -> Result<Vec<MubRecord>, SemantizeError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}
