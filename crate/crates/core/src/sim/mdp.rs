//! The four-phase daily MDP: idle → browsing → searching → ordering.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use super::env::EnvironmentState;
use super::error::{config_err, SimError};
use super::needs::{Outcome, SpecificIntent};
use super::persona::PersonaState;
use super::qa::CategoryRule;
use super::types::{ActionType, BehaviorEvent, Capabilities, EntityRef, NoiseFlag, Platform};
use crate::rng::weighted_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Idle,
    Browsing,
    Searching,
    Ordering,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Self::Idle, Self::Browsing, Self::Searching, Self::Ordering];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Idle => "idle",
            Self::Browsing => "browsing",
            Self::Searching => "searching",
            Self::Ordering => "ordering",
        })
    }
}

/// The cognitive/environment condition that selects a transition row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MdpCondition {
    /// No intent, no calendar event.
    Calm,
    /// No intent, some calendar event active.
    Event,
    /// An intent is active.
    Intent,
}

impl MdpCondition {
    pub const ALL: [MdpCondition; 3] = [Self::Calm, Self::Event, Self::Intent];

    pub fn of(state: &MdpState, env: &EnvironmentState) -> Self {
        if state.active_intent.is_some() {
            Self::Intent
        } else if !env.events.is_empty() {
            Self::Event
        } else {
            Self::Calm
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdpState {
    pub phase: Phase,
    pub active_intent: Option<SpecificIntent>,
}

impl MdpState {
    pub fn idle() -> Self {
        Self {
            phase: Phase::Idle,
            active_intent: None,
        }
    }
}

/// One row of the transition table as it appears in config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub phase: Phase,
    pub condition: MdpCondition,
    pub to: BTreeMap<Phase, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransitionTable {
    rows: BTreeMap<(Phase, MdpCondition), [f64; 4]>,
}

impl TransitionTable {
    /// Builds a table, rejecting unnormalized rows and rows that could
    /// enter `ordering` without an intent.
    pub fn from_rows(rows: &[TransitionRow]) -> Result<Self, SimError> {
        let mut out = BTreeMap::new();
        for r in rows {
            let mut p = [0.0; 4];
            for (to, w) in &r.to {
                if !w.is_finite() || *w < 0.0 {
                    return Err(config_err(format!(
                        "transition {}/{:?}: bad probability {w}",
                        r.phase, r.condition
                    )));
                }
                p[to.index()] = *w;
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(config_err(format!(
                    "transition {}/{:?}: row sums to {sum}",
                    r.phase, r.condition
                )));
            }
            if r.condition != MdpCondition::Intent && p[Phase::Ordering.index()] > 0.0 {
                return Err(config_err(format!(
                    "transition {}/{:?}: ordering needs an intent",
                    r.phase, r.condition
                )));
            }
            if out.insert((r.phase, r.condition), p).is_some() {
                return Err(config_err(format!(
                    "transition {}/{:?}: duplicate row",
                    r.phase, r.condition
                )));
            }
        }
        Ok(Self { rows: out })
    }

    pub fn rows(&self) -> Vec<TransitionRow> {
        self.rows
            .iter()
            .map(|((phase, condition), p)| TransitionRow {
                phase: *phase,
                condition: *condition,
                to: Phase::ALL
                    .into_iter()
                    .zip(p.iter().copied())
                    .filter(|(_, w)| *w > 0.0)
                    .collect(),
            })
            .collect()
    }

    pub fn row(&self, phase: Phase, condition: MdpCondition) -> Result<&[f64; 4], SimError> {
        self.rows
            .get(&(phase, condition))
            .ok_or_else(|| config_err(format!("missing transition row {phase}/{condition:?}")))
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        phase: Phase,
        condition: MdpCondition,
        rng: &mut R,
    ) -> Result<Phase, SimError> {
        let row = self.row(phase, condition)?;
        let i = weighted_index(row, rng).ok_or_else(|| config_err("empty transition row"))?;
        Ok(Phase::ALL[i])
    }
}

/// The shipped defaults: mostly idle days, livelier during calendar events,
/// and a drift towards ordering once an intent is active.
pub fn default_transition_rows() -> Vec<TransitionRow> {
    use MdpCondition::*;
    use Phase::*;
    let row = |phase, condition, p: [f64; 4]| TransitionRow {
        phase,
        condition,
        to: Phase::ALL
            .into_iter()
            .zip(p)
            .filter(|(_, w)| *w > 0.0)
            .collect(),
    };
    alloc::vec![
        row(Idle, Calm, [0.80, 0.15, 0.05, 0.0]),
        row(Idle, Event, [0.60, 0.30, 0.10, 0.0]),
        row(Idle, Intent, [0.50, 0.25, 0.20, 0.05]),
        row(Browsing, Calm, [0.60, 0.30, 0.10, 0.0]),
        row(Browsing, Event, [0.45, 0.40, 0.15, 0.0]),
        row(Browsing, Intent, [0.20, 0.30, 0.30, 0.20]),
        row(Searching, Calm, [0.60, 0.30, 0.10, 0.0]),
        row(Searching, Event, [0.50, 0.30, 0.20, 0.0]),
        row(Searching, Intent, [0.15, 0.20, 0.20, 0.45]),
        row(Ordering, Calm, [1.0, 0.0, 0.0, 0.0]),
        row(Ordering, Event, [1.0, 0.0, 0.0, 0.0]),
        row(Ordering, Intent, [0.90, 0.10, 0.0, 0.0]),
    ]
}

/// Read-only tables one step needs.
pub struct MdpContext<'a> {
    pub table: &'a TransitionTable,
    pub capabilities: &'a Capabilities,
    pub catalog: &'a Catalog,
    pub category_rules: &'a [CategoryRule],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub state: MdpState,
    pub events: Vec<BehaviorEvent>,
    /// Set when this step ran the intent to its terminal action.
    pub concluded: Option<SpecificIntent>,
}

fn event(
    env: &EnvironmentState,
    persona: &PersonaState,
    platform: Platform,
    action: ActionType,
    entity_id: &str,
    title: &str,
) -> BehaviorEvent {
    BehaviorEvent {
        timestamp: env.date,
        platform,
        action_type: action,
        entity: EntityRef {
            entity_id: entity_id.into(),
            title: title.into(),
        },
        noise_flag: NoiseFlag::Clean,
        actor_id: persona.user_id.clone(),
    }
}

/// A `(category, platform)` to browse when no intent steers attention,
/// weighted by the persona's dynamic preferences.
fn free_target<R: Rng + ?Sized>(
    persona: &PersonaState,
    env: &EnvironmentState,
    ctx: &MdpContext<'_>,
    action: ActionType,
    rng: &mut R,
) -> Option<(String, Platform)> {
    let mut options: Vec<(&str, Platform, f64)> = Vec::new();
    for (cat, w) in &persona.dynamic_preferences {
        if *w <= 0.0 {
            continue;
        }
        if ctx
            .category_rules
            .iter()
            .any(|r| r.category == *cat && !r.condition.holds(persona, env))
        {
            continue;
        }
        for p in Platform::ALL {
            if ctx.capabilities.supports(p, action) && ctx.catalog.has(cat, p) {
                options.push((cat, p, *w));
            }
        }
    }
    let weights: Vec<f64> = options.iter().map(|o| o.2).collect();
    weighted_index(&weights, rng).map(|i| (options[i].0.into(), options[i].1))
}

fn touch<R: Rng + ?Sized>(
    persona: &PersonaState,
    env: &EnvironmentState,
    ctx: &MdpContext<'_>,
    category: &str,
    platform: Platform,
    action: ActionType,
    rng: &mut R,
) -> Option<BehaviorEvent> {
    if !ctx.capabilities.supports(platform, action) {
        return None;
    }
    let item = ctx.catalog.pick(category, platform, persona, env.date, rng)?;
    Some(event(env, persona, platform, action, &item.entity_id, &item.title))
}

/// Samples the next phase and emits the events of the phase entered.
pub fn mdp_step<R: Rng + ?Sized>(
    state: &MdpState,
    persona: &PersonaState,
    env: &EnvironmentState,
    ctx: &MdpContext<'_>,
    rng: &mut R,
) -> Result<Step, SimError> {
    let cond = MdpCondition::of(state, env);
    let next = ctx.table.sample(state.phase, cond, rng)?;
    let mut intent = state.active_intent.clone();
    if state.phase == Phase::Ordering && next != Phase::Ordering {
        intent = None;
    }
    let mut events = Vec::new();
    let mut concluded = None;
    match next {
        Phase::Idle => {}
        Phase::Browsing | Phase::Searching => {
            let action = if next == Phase::Browsing {
                ActionType::Click
            } else {
                ActionType::Search
            };
            let target = match &intent {
                Some(i) => Some((i.target_category.clone(), i.platform)),
                None => free_target(persona, env, ctx, action, rng),
            };
            if let Some((cat, platform)) = target {
                events.extend(touch(persona, env, ctx, &cat, platform, action, rng));
            }
        }
        Phase::Ordering => {
            // Rows without an intent never reach ordering (checked at load).
            let i = intent
                .as_ref()
                .ok_or_else(|| config_err("entered ordering without an intent"))?;
            let action = match i.expected_outcome {
                Outcome::Fulfilled => i.action_type,
                Outcome::Abandoned if ctx.capabilities.supports(i.platform, ActionType::Cart) => {
                    ActionType::Cart
                }
                Outcome::Abandoned => ActionType::Click,
            };
            events.extend(touch(persona, env, ctx, &i.target_category, i.platform, action, rng));
            concluded = Some(i.clone());
        }
    }
    Ok(Step {
        state: MdpState {
            phase: next,
            active_intent: intent,
        },
        events,
        concluded,
    })
}
