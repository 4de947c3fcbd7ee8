//! Noise injection: misclicks, shared-account activity and repeat loops.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use super::error::{config_err, SimError};
use super::needs::terminal_action;
use super::types::{ActionType, BehaviorEvent, BehaviorTrace, Capabilities, EntityRef, NoiseFlag};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub misclick_rate: f64,
    pub shared_account_rate: f64,
    pub loop_rate: f64,
}

/// Copies emitted per loop artifact.
pub const LOOP_LEN: usize = 3;

impl NoiseConfig {
    pub fn shipped() -> Self {
        Self {
            misclick_rate: 0.03,
            shared_account_rate: 0.01,
            loop_rate: 0.01,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, r) in [
            ("misclick_rate", self.misclick_rate),
            ("shared_account_rate", self.shared_account_rate),
            ("loop_rate", self.loop_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(config_err(format!("{name} = {r} is outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// A noised trace plus the positions of every injected event.
#[derive(Debug, Clone, PartialEq)]
pub struct Noised {
    pub trace: BehaviorTrace,
    pub injected: Vec<usize>,
}

fn random_event<R: Rng + ?Sized>(
    source: &BehaviorEvent,
    catalog: &Catalog,
    caps: &Capabilities,
    flag: NoiseFlag,
    actor: &str,
    rng: &mut R,
) -> Option<BehaviorEvent> {
    let item = catalog.random_item(rng)?;
    let action = if caps.supports(item.platform, ActionType::Click) {
        if flag == NoiseFlag::SharedAccount && rng.gen_bool(0.3) {
            terminal_action(item.platform)
        } else {
            ActionType::Click
        }
    } else {
        terminal_action(item.platform)
    };
    caps.supports(item.platform, action).then(|| BehaviorEvent {
        timestamp: source.timestamp,
        platform: item.platform,
        action_type: action,
        entity: EntityRef {
            entity_id: item.entity_id.clone(),
            title: item.title.clone(),
        },
        noise_flag: flag,
        actor_id: actor.into(),
    })
}

/// Walks the clean events in order and, independently per event, inserts
/// a misclick, a shared-account event and a loop run right after it.
/// Clean events are kept verbatim and in order.
pub fn inject_noise<R: Rng + ?Sized>(
    trace: &BehaviorTrace,
    cfg: &NoiseConfig,
    catalog: &Catalog,
    caps: &Capabilities,
    rng: &mut R,
) -> Result<Noised, SimError> {
    cfg.validate()?;
    let mut events = Vec::with_capacity(trace.events.len());
    let mut injected = Vec::new();
    let shared_actor = format!("{}#shared", trace.user_id);
    for e in &trace.events {
        events.push(e.clone());
        if !e.noise_flag.is_clean() {
            continue;
        }
        if rng.gen_bool(cfg.misclick_rate) {
            if let Some(n) = random_event(e, catalog, caps, NoiseFlag::Misclick, &trace.user_id, rng) {
                injected.push(events.len());
                events.push(n);
            }
        }
        if rng.gen_bool(cfg.shared_account_rate) {
            if let Some(n) = random_event(e, catalog, caps, NoiseFlag::SharedAccount, &shared_actor, rng) {
                injected.push(events.len());
                events.push(n);
            }
        }
        if rng.gen_bool(cfg.loop_rate) {
            for _ in 0..LOOP_LEN {
                injected.push(events.len());
                events.push(BehaviorEvent {
                    noise_flag: NoiseFlag::Loop,
                    ..e.clone()
                });
            }
        }
    }
    Ok(Noised {
        trace: BehaviorTrace {
            user_id: trace.user_id.clone(),
            events,
            persona_history: trace.persona_history.clone(),
        },
        injected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::{add_days, parse_day};
    use crate::rng::seeded;
    use crate::sim::types::Platform;
    use alloc::string::String;

    fn clean_trace(n: usize) -> BehaviorTrace {
        let d0 = parse_day("2023-01-01").unwrap();
        BehaviorTrace {
            user_id: "u9".into(),
            events: (0..n)
                .map(|i| BehaviorEvent {
                    timestamp: add_days(d0, (i / 10) as i64),
                    platform: Platform::ECommerce,
                    action_type: ActionType::Click,
                    entity: EntityRef {
                        entity_id: String::from("ec-0001"),
                        title: String::from("t"),
                    },
                    noise_flag: NoiseFlag::Clean,
                    actor_id: "u9".into(),
                })
                .collect(),
            persona_history: Vec::new(),
        }
    }

    #[test]
    fn zero_rates_are_identity() {
        let t = clean_trace(200);
        let c = Catalog::builtin(1, 2);
        let n = inject_noise(&t, &NoiseConfig::default(), &c, &Capabilities::default(), &mut seeded(1))
            .unwrap();
        assert_eq!(n.trace, t);
        assert!(n.injected.is_empty());
    }

    #[test]
    fn misclick_count_is_binomial() {
        let t = clean_trace(10_000);
        let c = Catalog::builtin(1, 2);
        let cfg = NoiseConfig {
            misclick_rate: 0.05,
            ..Default::default()
        };
        let n = inject_noise(&t, &cfg, &c, &Capabilities::default(), &mut seeded(5)).unwrap();
        let k = n
            .trace
            .events
            .iter()
            .filter(|e| e.noise_flag == NoiseFlag::Misclick)
            .count();
        assert!((450..=550).contains(&k), "{k}");
    }

    #[test]
    fn ground_truth_matches_flags_and_clean_events_survive() {
        let t = clean_trace(3_000);
        let c = Catalog::builtin(1, 2);
        let cfg = NoiseConfig {
            misclick_rate: 0.1,
            shared_account_rate: 0.1,
            loop_rate: 0.1,
        };
        let n = inject_noise(&t, &cfg, &c, &Capabilities::default(), &mut seeded(6)).unwrap();
        let flagged: Vec<usize> = n
            .trace
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.noise_flag.is_clean())
            .map(|(i, _)| i)
            .collect();
        assert_eq!(flagged, n.injected);
        let kept: Vec<_> = n.trace.clean_events().cloned().collect();
        assert_eq!(kept, t.events);
        for e in &n.trace.events {
            if e.noise_flag == NoiseFlag::SharedAccount {
                assert_ne!(e.actor_id, t.user_id);
            }
            assert!(Capabilities::default().supports(e.platform, e.action_type));
        }
        assert!(n.trace.events.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    }

    #[test]
    fn rates_validated() {
        let bad = NoiseConfig {
            loop_rate: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
