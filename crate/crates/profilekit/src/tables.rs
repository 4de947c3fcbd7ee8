//! The simulator config as a directory of JSONL tables, one document per
//! table. A missing file falls back to the shipped table.
//!
//! | file | one line per |
//! |---|---|
//! | `population.jsonl` | population row (`table` = stratum, child_count, expecting, preference) |
//! | `transitions.jsonl` | MDP transition row |
//! | `desires.jsonl` | latent need |
//! | `life_events.jsonl` | life-event rule |
//! | `calendar.jsonl` | calendar entry |
//! | `routing.jsonl` | `{category, platforms}` |
//! | `capabilities.jsonl` | `{platform, actions}` |
//! | `category_rules.jsonl` | persona-gated category rule |
//! | `noise.jsonl` | the noise rates (single line) |
//! | `persona_rules.jsonl` | persona consistency knobs (single line) |
//! | `engine.jsonl` | engine parameters (single line) |

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use profilekit_core::sim::config::{default_library, default_routing};
use profilekit_core::sim::env::CalendarEntry;
use profilekit_core::sim::mdp::{default_transition_rows, TransitionRow};
use profilekit_core::sim::needs::PlatformRouting;
use profilekit_core::sim::persona::PersonaRules;
use profilekit_core::sim::population::{PopulationConfig, PopulationRow};
use profilekit_core::sim::qa::CategoryRule;
use profilekit_core::sim::types::Capabilities;
use profilekit_core::sim::{
    ActionType, Calendar, EngineParams, LatentNeed, LifeEventRule, LifeEventTable, NoiseConfig, Platform, SimConfig,
    TransitionTable,
};

use crate::error::{config_err, Result};
use crate::io::{read_jsonl, to_jsonl, write_file, IoError};

pub const POPULATION: &str = "population.jsonl";
pub const TRANSITIONS: &str = "transitions.jsonl";
pub const DESIRES: &str = "desires.jsonl";
pub const LIFE_EVENTS: &str = "life_events.jsonl";
pub const CALENDAR: &str = "calendar.jsonl";
pub const ROUTING: &str = "routing.jsonl";
pub const CAPABILITIES: &str = "capabilities.jsonl";
pub const CATEGORY_RULES: &str = "category_rules.jsonl";
pub const NOISE: &str = "noise.jsonl";
pub const PERSONA_RULES: &str = "persona_rules.jsonl";
pub const ENGINE: &str = "engine.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRow {
    pub category: String,
    pub platforms: Vec<Platform>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityRow {
    pub platform: Platform,
    pub actions: BTreeSet<ActionType>,
}

fn table<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<Option<Vec<T>>> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    read_jsonl(&path).map(Some).map_err(config_err)
}

fn single<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<Option<T>> {
    match table::<T>(dir, name)? {
        None => Ok(None),
        Some(mut v) if v.len() == 1 => Ok(v.pop()),
        Some(v) => Err(config_err(format!("{name}: expected one record, found {}", v.len()))),
    }
}

/// Loads and validates the tables under `dir` over the shipped defaults.
pub fn load_sim_config(dir: &Path) -> Result<SimConfig> {
    if !dir.is_dir() {
        return Err(config_err(format!("{}: not a config directory", dir.display())));
    }
    let mut cfg = SimConfig::shipped();
    if let Some(r) = single::<PersonaRules>(dir, PERSONA_RULES)? {
        cfg.persona_rules = r;
    }
    let pop_rows = table::<PopulationRow>(dir, POPULATION)?.unwrap_or_else(|| cfg.population.to_rows());
    cfg.population =
        PopulationConfig::from_rows(&pop_rows, cfg.persona_rules.min_parental_gap_years).map_err(config_err)?;
    if let Some(rows) = table::<TransitionRow>(dir, TRANSITIONS)? {
        cfg.transitions = TransitionTable::from_rows(&rows).map_err(config_err)?;
    }
    if let Some(v) = table::<LatentNeed>(dir, DESIRES)? {
        cfg.library = v;
    }
    if let Some(rules) = table::<LifeEventRule>(dir, LIFE_EVENTS)? {
        cfg.life_events = LifeEventTable { rules };
    }
    if let Some(entries) = table::<CalendarEntry>(dir, CALENDAR)? {
        cfg.calendar = Calendar { entries };
    }
    if let Some(rows) = table::<RouteRow>(dir, ROUTING)? {
        cfg.routing = PlatformRouting {
            routes: rows.into_iter().map(|r| (r.category, r.platforms)).collect(),
        };
    }
    if let Some(rows) = table::<CapabilityRow>(dir, CAPABILITIES)? {
        cfg.capabilities = Capabilities {
            table: rows.into_iter().map(|r| (r.platform, r.actions)).collect(),
        };
    }
    if let Some(v) = table::<CategoryRule>(dir, CATEGORY_RULES)? {
        cfg.category_rules = v;
    }
    if let Some(n) = single::<NoiseConfig>(dir, NOISE)? {
        cfg.noise = n;
    }
    if let Some(e) = single::<EngineParams>(dir, ENGINE)? {
        cfg.engine = e;
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

/// Writes every shipped table into `dir`; returns the written paths.
pub fn write_shipped_tables(dir: &Path) -> std::result::Result<Vec<PathBuf>, IoError> {
    let cfg = SimConfig::shipped();
    let routing = default_routing();
    let files: Vec<(&str, String)> = vec![
        (POPULATION, to_jsonl(&cfg.population.to_rows())),
        (TRANSITIONS, to_jsonl(&default_transition_rows())),
        (DESIRES, to_jsonl(&default_library())),
        (LIFE_EVENTS, to_jsonl(&cfg.life_events.rules)),
        (CALENDAR, to_jsonl(&cfg.calendar.entries)),
        (
            ROUTING,
            to_jsonl(
                &routing
                    .routes
                    .iter()
                    .map(|(c, p)| RouteRow {
                        category: c.clone(),
                        platforms: p.clone(),
                    })
                    .collect::<Vec<_>>(),
            ),
        ),
        (
            CAPABILITIES,
            to_jsonl(
                &cfg.capabilities
                    .table
                    .iter()
                    .map(|(p, a)| CapabilityRow {
                        platform: *p,
                        actions: a.clone(),
                    })
                    .collect::<Vec<_>>(),
            ),
        ),
        (CATEGORY_RULES, to_jsonl(&cfg.category_rules)),
        (NOISE, to_jsonl(&[cfg.noise])),
        (PERSONA_RULES, to_jsonl(&[cfg.persona_rules.clone()])),
        (ENGINE, to_jsonl(&[cfg.engine.clone()])),
    ];
    let mut out = Vec::new();
    for (name, text) in files {
        let p = dir.join(name);
        write_file(&p, text.as_bytes())?;
        out.push(p);
    }
    Ok(out)
}
