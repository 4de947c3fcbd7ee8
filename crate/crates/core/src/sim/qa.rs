//! Trace QA: the built-in consistency rules between behaviors, personas,
//! platforms and time.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::catalog::{formula_stage_for_age, Catalog};
use super::env::EnvironmentState;
use super::needs::Condition;
use super::persona::PersonaState;
use super::types::{ActionType, BehaviorTrace, Capabilities};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    /// The platform does not support the action.
    PlatformAction,
    /// An event is dated before its predecessor.
    TimestampOrder,
    /// A category the persona at that date is not eligible for.
    PersonaCategory,
    /// Formula stage going backwards for the same infant.
    FormulaRegression,
    /// Formula stage that fits no child's age.
    FormulaAgeMismatch,
    /// A clean event performed by someone other than the user.
    ActorMismatch,
    /// Persona snapshots out of order or missing for early events.
    SnapshotOrder,
    /// Children disappearing, re-dated or recorded before birth across snapshots.
    HouseholdChronology,
}

impl RuleId {
    pub const ALL: [RuleId; 8] = [
        Self::PlatformAction,
        Self::TimestampOrder,
        Self::PersonaCategory,
        Self::FormulaRegression,
        Self::FormulaAgeMismatch,
        Self::ActorMismatch,
        Self::SnapshotOrder,
        Self::HouseholdChronology,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PlatformAction => "platform-action",
            Self::TimestampOrder => "timestamp-order",
            Self::PersonaCategory => "persona-category",
            Self::FormulaRegression => "formula-regression",
            Self::FormulaAgeMismatch => "formula-age-mismatch",
            Self::ActorMismatch => "actor-mismatch",
            Self::SnapshotOrder => "snapshot-order",
            Self::HouseholdChronology => "household-chronology",
        }
    }

    /// Rules that judge a single emitted event, as opposed to ordering or
    /// the persona history itself.
    pub fn is_event_level(self) -> bool {
        matches!(
            self,
            Self::PlatformAction
                | Self::PersonaCategory
                | Self::FormulaRegression
                | Self::FormulaAgeMismatch
                | Self::ActorMismatch
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule_id: RuleId,
    /// For snapshot rules these index `persona_history`, not `events`.
    pub event_indices: Vec<usize>,
    pub description: String,
}

/// A persona predicate a category requires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRule {
    pub category: String,
    pub condition: Condition,
}

pub fn default_category_rules() -> Vec<CategoryRule> {
    use Condition::*;
    let r = |category: &str, condition| CategoryRule {
        category: category.into(),
        condition,
    };
    alloc::vec![
        r("baby-formula", HasChildAgedMonths { min: 0, max: 36 }),
        r(
            "baby-care",
            Any(alloc::vec![HasChildAgedMonths { min: 0, max: 36 }, Expecting]),
        ),
        r("maternity", Expecting),
        r("kids-education", HasChildAgedMonths { min: 36, max: 216 }),
        r("family-venue", HasChildAgedMonths { min: 24, max: 144 }),
    ]
}

pub struct Validator<'a> {
    pub capabilities: &'a Capabilities,
    pub category_rules: &'a [CategoryRule],
    pub catalog: &'a Catalog,
}

/// Stage range, in months, each formula stage is meant for.
fn stage_fits(stage: u8, months: i32) -> bool {
    formula_stage_for_age(months) == Some(stage)
}

impl Validator<'_> {
    pub fn validate(&self, trace: &BehaviorTrace) -> Vec<Violation> {
        let mut out = Vec::new();
        self.check_events(trace, &mut out);
        self.check_history(trace, &mut out);
        out
    }

    fn check_events(&self, trace: &BehaviorTrace, out: &mut Vec<Violation>) {
        let mut push = |rule_id, event_indices, description| {
            out.push(Violation {
                rule_id,
                event_indices,
                description,
            })
        };
        // Last formula stage bought for each infant, keyed by birth date.
        let mut last_stage: BTreeMap<crate::date::Date, (u8, usize)> = BTreeMap::new();
        for (i, e) in trace.events.iter().enumerate() {
            if !self.capabilities.supports(e.platform, e.action_type) {
                push(
                    RuleId::PlatformAction,
                    alloc::vec![i],
                    format!("{} does not support {}", e.platform, e.action_type),
                );
            }
            if i > 0 && e.timestamp < trace.events[i - 1].timestamp {
                push(
                    RuleId::TimestampOrder,
                    alloc::vec![i - 1, i],
                    format!("{} after {}", e.timestamp, trace.events[i - 1].timestamp),
                );
            }
            if !e.noise_flag.is_clean() {
                continue;
            }
            if e.actor_id != trace.user_id {
                push(
                    RuleId::ActorMismatch,
                    alloc::vec![i],
                    format!("clean event by '{}'", e.actor_id),
                );
            }
            let (Some(persona), Some(item)) = (
                trace.persona_at(e.timestamp),
                self.catalog.get(&e.entity.entity_id),
            ) else {
                continue;
            };
            let env = EnvironmentState {
                date: e.timestamp,
                events: BTreeSet::new(),
                pois: Vec::new(),
            };
            for r in self.category_rules.iter().filter(|r| r.category == item.category) {
                if !r.condition.holds(persona, &env) {
                    push(
                        RuleId::PersonaCategory,
                        alloc::vec![i],
                        format!("persona not eligible for '{}' on {}", item.category, e.timestamp),
                    );
                }
            }
            let (Some(stage), ActionType::Purchase) = (item.formula_stage, e.action_type) else {
                continue;
            };
            if !persona.child_ages_months(e.timestamp).any(|m| stage_fits(stage, m)) {
                push(
                    RuleId::FormulaAgeMismatch,
                    alloc::vec![i],
                    format!("stage-{stage} formula fits no child on {}", e.timestamp),
                );
            }
            if let Some(child) = single_infant(persona, e.timestamp) {
                match last_stage.get(&child).copied() {
                    Some((prev, j)) if stage < prev => push(
                        RuleId::FormulaRegression,
                        alloc::vec![j, i],
                        format!("stage-{stage} formula after stage-{prev}"),
                    ),
                    Some((prev, _)) if stage == prev => {}
                    _ => {
                        last_stage.insert(child, (stage, i));
                    }
                }
            }
        }
    }

    fn check_history(&self, trace: &BehaviorTrace, out: &mut Vec<Violation>) {
        let h = &trace.persona_history;
        if h.is_empty() {
            if !trace.events.is_empty() {
                out.push(Violation {
                    rule_id: RuleId::SnapshotOrder,
                    event_indices: Vec::new(),
                    description: "events without any persona snapshot".into(),
                });
            }
            return;
        }
        if let Some(first) = trace.events.first() {
            if h[0].date > first.timestamp {
                out.push(Violation {
                    rule_id: RuleId::SnapshotOrder,
                    event_indices: alloc::vec![0],
                    description: format!("first snapshot {} after first event", h[0].date),
                });
            }
        }
        for j in 1..h.len() {
            if h[j].date <= h[j - 1].date {
                out.push(Violation {
                    rule_id: RuleId::SnapshotOrder,
                    event_indices: alloc::vec![j - 1, j],
                    description: format!("snapshot {} not after {}", h[j].date, h[j - 1].date),
                });
            }
        }
        for (j, s) in h.iter().enumerate() {
            let mut bad = s.persona.household.children.iter().any(|c| c.birth_date > s.date);
            if j > 0 {
                let prev = &h[j - 1].persona;
                let cur = &s.persona;
                bad |= prev.demographics.birth_date != cur.demographics.birth_date;
                bad |= !cur.household.children.starts_with(&prev.household.children);
            }
            if bad {
                out.push(Violation {
                    rule_id: RuleId::HouseholdChronology,
                    event_indices: alloc::vec![j],
                    description: format!("household inconsistent at snapshot {}", s.date),
                });
            }
        }
    }
}

/// Birth date of the only child under 36 months, if exactly one.
fn single_infant(p: &PersonaState, on: crate::date::Date) -> Option<crate::date::Date> {
    let mut it = p
        .household
        .children
        .iter()
        .filter(|c| (0..36).contains(&c.age_months(on)));
    match (it.next(), it.next()) {
        (Some(c), None) => Some(c.birth_date),
        _ => None,
    }
}

pub fn validate_trace(trace: &BehaviorTrace, validator: &Validator<'_>) -> Vec<Violation> {
    validator.validate(trace)
}
