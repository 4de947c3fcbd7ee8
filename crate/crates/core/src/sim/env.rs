//! The daily environment: calendar events and the POIs around a user.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::date::{add_days, Date};

/// A recurring yearly window, inclusive on both ends, `(month, day)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalendarEntry {
    pub tag: String,
    pub start: (u32, u32),
    pub end: (u32, u32),
    /// Shopping festivals boost needs that react to sales.
    #[serde(default)]
    pub shopping_festival: bool,
}

impl CalendarEntry {
    pub fn covers(&self, date: Date) -> bool {
        let md = (date.month(), date.day());
        if self.start <= self.end {
            self.start <= md && md <= self.end
        } else {
            md >= self.start || md <= self.end
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calendar {
    pub entries: Vec<CalendarEntry>,
}

impl Default for Calendar {
    fn default() -> Self {
        let e = |tag: &str, start, end, shopping_festival| CalendarEntry {
            tag: tag.into(),
            start,
            end,
            shopping_festival,
        };
        Self {
            entries: alloc::vec![
                e("618", (6, 1), (6, 18), true),
                e("double-11", (11, 1), (11, 11), true),
                e("back-to-school", (8, 20), (9, 5), false),
                // Lunar dates drift; a fixed late-Jan to mid-Feb window stands in.
                e("spring-festival", (1, 20), (2, 15), false),
                e("summer-holiday", (7, 10), (8, 25), false),
                e("national-day", (10, 1), (10, 7), false),
            ],
        }
    }
}

impl Calendar {
    pub fn events_on(&self, date: Date) -> BTreeSet<String> {
        self.entries
            .iter()
            .filter(|e| e.covers(date))
            .map(|e| e.tag.clone())
            .collect()
    }

    pub fn is_festival(&self, tag: &str) -> bool {
        self.entries.iter().any(|e| e.tag == tag && e.shopping_festival)
    }

    pub fn contains_tag(&self, tag: &str) -> bool {
        self.entries.iter().any(|e| e.tag == tag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poi {
    pub poi_id: String,
    pub kind: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentState {
    pub date: Date,
    pub events: BTreeSet<String>,
    pub pois: Vec<Poi>,
}

impl EnvironmentState {
    pub fn new(date: Date, calendar: &Calendar, pois: Vec<Poi>) -> Self {
        Self {
            date,
            events: calendar.events_on(date),
            pois,
        }
    }

    /// Moves to the next day and refreshes the event tags.
    pub fn advance(&mut self, calendar: &Calendar) {
        self.date = add_days(self.date, 1);
        self.events = calendar.events_on(self.date);
    }

    pub fn festival_active(&self, calendar: &Calendar) -> bool {
        self.events.iter().any(|t| calendar.is_festival(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::parse_day;

    #[test]
    fn calendar_windows() {
        let cal = Calendar::default();
        let on = |s: &str| cal.events_on(parse_day(s).unwrap());
        assert!(on("2024-06-18").contains("618"));
        assert!(!on("2024-06-19").contains("618"));
        assert!(on("2024-11-11").contains("double-11"));
        assert!(on("2024-03-03").is_empty());
    }

    #[test]
    fn wrapping_window() {
        let e = CalendarEntry {
            tag: "new-year".into(),
            start: (12, 28),
            end: (1, 3),
            shopping_festival: false,
        };
        assert!(e.covers(parse_day("2024-12-30").unwrap()));
        assert!(e.covers(parse_day("2025-01-02").unwrap()));
        assert!(!e.covers(parse_day("2025-01-04").unwrap()));
    }

    #[test]
    fn advance_is_strictly_monotone() {
        let cal = Calendar::default();
        let mut env = EnvironmentState::new(parse_day("2024-05-31").unwrap(), &cal, Vec::new());
        assert!(env.events.is_empty());
        env.advance(&cal);
        assert_eq!(env.date, parse_day("2024-06-01").unwrap());
        assert!(env.events.contains("618"));
    }
}
