//! Trace files: a header line `{user_id, seed, horizon}` followed by one
//! line per event with fields in the fixed order timestamp, platform,
//! action_type, entity_id, entity_title, noise_flag, actor_id.

use serde::{Deserialize, Serialize};

use profilekit_core::date::Date;
use profilekit_core::sim::types::EntityRef;
use profilekit_core::sim::{ActionType, BehaviorEvent, BehaviorTrace, NoiseFlag, Platform};

use crate::io::{to_jsonl, IoError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub user_id: String,
    pub seed: u64,
    pub horizon: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub timestamp: Date,
    pub platform: Platform,
    pub action_type: ActionType,
    pub entity_id: String,
    pub entity_title: String,
    pub noise_flag: NoiseFlag,
    pub actor_id: String,
}

impl From<&BehaviorEvent> for EventRecord {
    fn from(e: &BehaviorEvent) -> Self {
        Self {
            timestamp: e.timestamp,
            platform: e.platform,
            action_type: e.action_type,
            entity_id: e.entity.entity_id.clone(),
            entity_title: e.entity.title.clone(),
            noise_flag: e.noise_flag,
            actor_id: e.actor_id.clone(),
        }
    }
}

impl From<EventRecord> for BehaviorEvent {
    fn from(r: EventRecord) -> Self {
        Self {
            timestamp: r.timestamp,
            platform: r.platform,
            action_type: r.action_type,
            entity: EntityRef {
                entity_id: r.entity_id,
                title: r.entity_title,
            },
            noise_flag: r.noise_flag,
            actor_id: r.actor_id,
        }
    }
}

pub fn render_trace(header: &TraceHeader, trace: &BehaviorTrace) -> String {
    let mut s = to_jsonl(std::slice::from_ref(header));
    let events: Vec<EventRecord> = trace.events.iter().map(EventRecord::from).collect();
    s.push_str(&to_jsonl(&events));
    s
}

/// Parses a trace file. Persona history is not part of the format and comes
/// back empty.
pub fn parse_trace(text: &str, origin: &str) -> Result<(TraceHeader, BehaviorTrace), IoError> {
    let bad = |line: usize, message: String| IoError::Parse {
        origin: origin.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| bad(1, "empty trace file".into()))?;
    let header: TraceHeader = serde_json::from_str(first).map_err(|e| bad(1, format!("header: {e}")))?;
    let mut events = Vec::new();
    for (i, l) in lines {
        let r: EventRecord = serde_json::from_str(l).map_err(|e| bad(i + 1, e.to_string()))?;
        events.push(r.into());
    }
    let trace = BehaviorTrace {
        user_id: header.user_id.clone(),
        events,
        persona_history: Vec::new(),
    };
    Ok((header, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use profilekit_core::rng::{seeded, user_rng};
    use profilekit_core::sim::{sample_persona, simulate_user, SimConfig};

    #[test]
    fn trace_round_trip_and_field_order() {
        let cfg = SimConfig::shipped();
        let p = sample_persona("u1", &cfg.population, &mut seeded(1)).unwrap();
        let sim = simulate_user(&p, 60, &cfg, &cfg.catalog(), &mut user_rng(1, "u1")).unwrap();
        let h = TraceHeader {
            user_id: "u1".into(),
            seed: 1,
            horizon: 60,
        };
        let text = render_trace(&h, &sim.trace);
        let (h2, t2) = parse_trace(&text, "t").unwrap();
        assert_eq!(h2, h);
        assert_eq!(t2.events, sim.trace.events);
        let line = text.lines().nth(1).unwrap();
        let keys = ["timestamp", "platform", "action_type", "entity_id", "entity_title", "noise_flag", "actor_id"];
        let pos: Vec<usize> = keys.iter().map(|k| line.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
    }
}
