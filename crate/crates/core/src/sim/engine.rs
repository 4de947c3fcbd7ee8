//! The daily simulation loop for one user.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::catalog::Catalog;
use super::config::SimConfig;
use super::env::EnvironmentState;
use super::error::SimError;
use super::evolve::{evolve_persona, EvolveContext, Trigger};
use super::mdp::{mdp_step, MdpContext, MdpState};
use super::needs::{activate_needs, crystallize_intent, Outcome};
use super::noise::inject_noise;
use super::persona::PersonaState;
use super::qa::{Validator, Violation};
use super::types::{BehaviorEvent, BehaviorTrace, PersonaSnapshot};
use crate::date::{add_days, days_between, Date};

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub trace: BehaviorTrace,
    /// Indices of injected noise events in `trace.events`.
    pub injected: Vec<usize>,
    /// Clean events dropped before emission, with the rule they broke.
    pub rectified: Vec<Violation>,
}

fn record(history: &mut Vec<PersonaSnapshot>, date: Date, persona: &PersonaState) {
    match history.last_mut() {
        Some(last) if last.date == date => last.persona = persona.clone(),
        Some(last) if last.persona == *persona => {}
        _ => history.push(PersonaSnapshot {
            date,
            persona: persona.clone(),
        }),
    }
}

/// Simulates `horizon` days starting at `cfg.engine.start`.
pub fn simulate_user<R: Rng + ?Sized>(
    persona: &PersonaState,
    horizon: u32,
    cfg: &SimConfig,
    catalog: &Catalog,
    rng: &mut R,
) -> Result<Simulation, SimError> {
    if horizon == 0 {
        return Err(SimError::EmptyHorizon);
    }
    let start = cfg.engine.start;
    let mut p = persona.clone();
    let mut env = EnvironmentState::new(start, &cfg.calendar, catalog.pois(p.demographics.region));
    let mut history = alloc::vec![PersonaSnapshot {
        date: start,
        persona: p.clone(),
    }];
    let evolve_ctx = EvolveContext {
        table: &cfg.life_events,
        preference_cap: cfg.engine.preference_cap,
        catalog,
    };
    let mdp_ctx = MdpContext {
        table: &cfg.transitions,
        capabilities: &cfg.capabilities,
        catalog,
        category_rules: &cfg.category_rules,
    };
    let birth_tag: Option<String> = cfg.life_events.birth_tag().map(String::from);
    let mut state = MdpState::idle();
    let mut intent_since = start;
    let mut last_fulfilled: BTreeMap<String, Date> = BTreeMap::new();
    let mut events: Vec<BehaviorEvent> = Vec::new();
    let mut since_periodic = 0usize;

    for day in 0..horizon {
        if day > 0 {
            env.advance(&cfg.calendar);
        }
        let today = env.date;
        let before = p.clone();

        if let (Some(due), Some(tag)) = (p.pending_birth, &birth_tag) {
            if due <= today {
                let t = Trigger::Event {
                    tag: tag.clone(),
                    date: today,
                };
                p = evolve_persona(&p, &t, &[], &evolve_ctx, rng)?;
            }
        }
        for rule in &cfg.life_events.rules {
            if rule.daily_rate > 0.0
                && rule.condition.holds(&p, &env)
                && rng.gen_bool(rule.daily_rate)
            {
                let t = Trigger::Event {
                    tag: rule.tag.clone(),
                    date: today,
                };
                p = evolve_persona(&p, &t, &[], &evolve_ctx, rng)?;
                break;
            }
        }
        if day > 0 && i64::from(day) % cfg.engine.evolution_period_days == 0 {
            p = evolve_persona(&p, &Trigger::Periodic, &events[since_periodic..], &evolve_ctx, rng)?;
            since_periodic = events.len();
        }
        if p != before {
            if p.demographics.region != before.demographics.region {
                env.pois = catalog.pois(p.demographics.region);
            }
            record(&mut history, today, &p);
        }

        let active = activate_needs(&p, &env, &cfg.library);
        if let Some(i) = &state.active_intent {
            let expired = days_between(intent_since, today) > cfg.engine.intent_ttl_days;
            if expired || !active.iter().any(|n| n.need_id == i.need_id) {
                state = MdpState::idle();
            }
        }
        if state.active_intent.is_none() {
            let boost = env.festival_active(&cfg.calendar);
            for need in &active {
                let since = last_fulfilled.get(&need.need_id).map(|d| days_between(*d, today));
                let mut rate = need.base_rate * need.urge(since);
                if boost {
                    rate *= need.festival_boost;
                }
                if rng.gen_bool(rate.clamp(0.0, 1.0)) {
                    let intent = crystallize_intent(
                        need,
                        &cfg.routing,
                        &cfg.capabilities,
                        cfg.engine.fulfil_probability,
                        rng,
                    )?;
                    state.active_intent = Some(intent);
                    intent_since = today;
                    break;
                }
            }
        }

        for _ in 0..cfg.engine.steps_per_day {
            let step = mdp_step(&state, &p, &env, &mdp_ctx, rng)?;
            events.extend(step.events);
            if let Some(done) = step.concluded {
                if done.expected_outcome == Outcome::Fulfilled {
                    last_fulfilled.insert(done.need_id, today);
                }
            }
            state = step.state;
        }
    }
    debug_assert!(events.last().is_none_or(|e| e.timestamp <= add_days(start, i64::from(horizon) - 1)));

    let mut trace = BehaviorTrace {
        user_id: p.user_id.clone(),
        events,
        persona_history: history,
    };
    let validator = Validator {
        capabilities: &cfg.capabilities,
        category_rules: &cfg.category_rules,
        catalog,
    };
    let rectified = rectify(&mut trace, &validator);
    let noised = inject_noise(&trace, &cfg.noise, catalog, &cfg.capabilities, rng)?;
    Ok(Simulation {
        trace: noised.trace,
        injected: noised.injected,
        rectified,
    })
}

/// Drops clean events that break an event-level rule until none remain.
/// For pairwise rules the later event is the one dropped.
pub fn rectify(trace: &mut BehaviorTrace, validator: &Validator<'_>) -> Vec<Violation> {
    let mut dropped = Vec::new();
    loop {
        let bad: Vec<Violation> = validator
            .validate(trace)
            .into_iter()
            .filter(|v| v.rule_id.is_event_level())
            .collect();
        if bad.is_empty() {
            return dropped;
        }
        let mut idx: Vec<usize> = bad
            .iter()
            .filter_map(|v| v.event_indices.last().copied())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        for i in idx.iter().rev() {
            log::debug!("{}: dropping event {} on {}", trace.user_id, i, trace.events[*i].timestamp);
            trace.events.remove(*i);
        }
        dropped.extend(bad);
    }
}
