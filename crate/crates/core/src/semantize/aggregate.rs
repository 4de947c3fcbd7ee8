//! Coarse-to-fine temporal aggregation into (bucket, platform, action) cells.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::error::SemantizeError;
use crate::date::{add_days, parse_day, Date};
use crate::sim::types::{ActionType, Platform};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Day,
    Month,
    Year,
}

impl Granularity {
    pub fn bucket(self, d: Date) -> TimeBucket {
        match self {
            Self::Day => TimeBucket::Day(d),
            Self::Month => TimeBucket::Month(d.year(), d.month()),
            Self::Year => TimeBucket::Year(d.year()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeBucket {
    Day(Date),
    Month(i32, u32),
    Year(i32),
}

impl TimeBucket {
    pub fn start(self) -> Date {
        match self {
            Self::Day(d) => d,
            Self::Month(y, m) => Date::from_ymd_opt(y, m, 1).expect("valid month bucket"),
            Self::Year(y) => Date::from_ymd_opt(y, 1, 1).expect("valid year bucket"),
        }
    }

    /// Last day covered by the bucket.
    pub fn end(self) -> Date {
        match self {
            Self::Day(d) => d,
            Self::Month(y, m) => crate::date::last_day_of_month(y, m),
            Self::Year(y) => Date::from_ymd_opt(y, 12, 31).expect("valid year bucket"),
        }
    }

    pub fn granularity(self) -> Granularity {
        match self {
            Self::Day(_) => Granularity::Day,
            Self::Month(..) => Granularity::Month,
            Self::Year(_) => Granularity::Year,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        match s.len() {
            10 => parse_day(s).filter(|d| d.to_string() == s).map(Self::Day),
            7 => {
                let (y, m) = (s.get(..4)?, s.get(5..)?);
                if s.as_bytes()[4] != b'-' || !digits(y) || !digits(m) {
                    return None;
                }
                let (y, m) = (y.parse().ok()?, m.parse().ok()?);
                Date::from_ymd_opt(y, m, 1)?;
                Some(Self::Month(y, m))
            }
            4 if digits(s) => {
                let y = s.parse().ok()?;
                Date::from_ymd_opt(y, 1, 1)?;
                Some(Self::Year(y))
            }
            _ => None,
        }
    }
}

impl fmt::Display for TimeBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Day(d) => write!(f, "{d}"),
            Self::Month(y, m) => write!(f, "{y:04}-{m:02}"),
            Self::Year(y) => write!(f, "{y:04}"),
        }
    }
}

/// Newest first; on equal start dates the finer bucket comes first.
impl Ord for TimeBucket {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .start()
            .cmp(&self.start())
            .then((self.granularity() as u8).cmp(&(other.granularity() as u8)))
    }
}

impl PartialOrd for TimeBucket {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Leaf category → group. Leaves without a group count as their own group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub groups: BTreeMap<String, String>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Self {
            groups: vocab::TAXONOMY
                .iter()
                .map(|(l, g)| (l.to_string(), g.to_string()))
                .collect(),
        }
    }
}

impl Taxonomy {
    pub const UNCATEGORIZED: &'static str = "uncategorized";

    pub fn group_of<'a>(&'a self, leaf: Option<&'a str>) -> &'a str {
        match leaf {
            None => Self::UNCATEGORIZED,
            Some(l) => self.groups.get(l).map(String::as_str).unwrap_or(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AggregationPolicy {
    /// Events older than this many days before `now` are long-term.
    pub long_term_cutoff_days: i64,
    pub long_term_granularity: Granularity,
    pub long_term_actions: BTreeSet<ActionType>,
    pub short_term_granularity: Granularity,
    pub top_k: usize,
    pub taxonomy: Taxonomy,
}

impl Default for AggregationPolicy {
    fn default() -> Self {
        Self {
            long_term_cutoff_days: 90,
            long_term_granularity: Granularity::Month,
            long_term_actions: [ActionType::Purchase].into_iter().collect(),
            short_term_granularity: Granularity::Day,
            top_k: 3,
            taxonomy: Taxonomy::default(),
        }
    }
}

impl AggregationPolicy {
    pub fn validate(&self) -> Result<(), SemantizeError> {
        let bad = |m: &str| Err(SemantizeError::InvalidRecord(m.into()));
        if self.top_k == 0 {
            return bad("top_k must be at least 1");
        }
        if self.long_term_cutoff_days < 0 {
            return bad("cutoff must be non-negative");
        }
        if self.long_term_granularity == Granularity::Day {
            return bad("long-term granularity must be month or year");
        }
        Ok(())
    }

    pub fn is_long_term(&self, d: Date, now: Date) -> bool {
        d < add_days(now, -self.long_term_cutoff_days)
    }
}

/// One event after refinement and filtering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedEvent {
    pub timestamp: Date,
    pub platform: Platform,
    pub action: ActionType,
    /// Injected noise: misclick, shared account or loop artifact.
    pub noisy: bool,
    /// Rendered refined entity.
    pub item: String,
    pub category: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub bucket: TimeBucket,
    pub platform: Platform,
    pub action: ActionType,
    pub events: Vec<RefinedEvent>,
}

/// Cells in MUB order; events keep input order inside a cell.
pub fn aggregate(events: &[RefinedEvent], policy: &AggregationPolicy, now: Date) -> Vec<Cell> {
    let mut cells: BTreeMap<(TimeBucket, Platform, ActionType), Vec<RefinedEvent>> = BTreeMap::new();
    for e in events {
        let bucket = if policy.is_long_term(e.timestamp, now) {
            if !policy.long_term_actions.contains(&e.action) {
                continue;
            }
            policy.long_term_granularity.bucket(e.timestamp)
        } else {
            policy.short_term_granularity.bucket(e.timestamp)
        };
        cells
            .entry((bucket, e.platform, e.action))
            .or_default()
            .push(e.clone());
    }
    cells
        .into_iter()
        .map(|((bucket, platform, action), events)| Cell {
            bucket,
            platform,
            action,
            events,
        })
        .collect()
}
