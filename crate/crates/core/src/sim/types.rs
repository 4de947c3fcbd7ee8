//! Platforms, actions and the event/trace records the simulator emits.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::persona::PersonaState;
use crate::date::Date;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Platform {
    #[serde(rename = "E-commerce")]
    ECommerce,
    #[serde(rename = "Delivery")]
    Delivery,
    #[serde(rename = "OTA")]
    Ota,
    #[serde(rename = "POI")]
    Poi,
}

impl Platform {
    pub const ALL: [Platform; 4] = [Self::ECommerce, Self::Delivery, Self::Ota, Self::Poi];

    pub fn name(self) -> &'static str {
        match self {
            Self::ECommerce => "E-commerce",
            Self::Delivery => "Delivery",
            Self::Ota => "OTA",
            Self::Poi => "POI",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionType {
    Search,
    Click,
    Cart,
    Purchase,
    Visit,
}

impl ActionType {
    pub const ALL: [ActionType; 5] = [
        Self::Search,
        Self::Click,
        Self::Cart,
        Self::Purchase,
        Self::Visit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Search => "Search",
            Self::Click => "Click",
            Self::Cart => "Cart",
            Self::Purchase => "Purchase",
            Self::Visit => "Visit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseFlag {
    Clean,
    Misclick,
    SharedAccount,
    Loop,
}

impl NoiseFlag {
    pub fn name(self) -> &'static str {
        match self {
            Self::Clean => "clean",
            Self::Misclick => "misclick",
            Self::SharedAccount => "shared-account",
            Self::Loop => "loop",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Clean, Self::Misclick, Self::SharedAccount, Self::Loop]
            .into_iter()
            .find(|n| n.name() == s)
    }

    pub fn is_clean(self) -> bool {
        self == Self::Clean
    }
}

/// Which actions each platform supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capabilities {
    pub table: BTreeMap<Platform, BTreeSet<ActionType>>,
}

impl Default for Capabilities {
    fn default() -> Self {
        use ActionType::*;
        let mut table = BTreeMap::new();
        table.insert(
            Platform::ECommerce,
            [Search, Click, Cart, Purchase].into_iter().collect(),
        );
        table.insert(Platform::Delivery, [Search, Click, Purchase].into_iter().collect());
        table.insert(Platform::Ota, [Search, Click, Purchase].into_iter().collect());
        table.insert(Platform::Poi, [Visit].into_iter().collect());
        Self { table }
    }
}

impl Capabilities {
    pub fn supports(&self, platform: Platform, action: ActionType) -> bool {
        self.table.get(&platform).is_some_and(|s| s.contains(&action))
    }
}

/// The entity an event touched, as it appears in the raw log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRef {
    pub entity_id: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorEvent {
    pub timestamp: Date,
    pub platform: Platform,
    pub action_type: ActionType,
    pub entity: EntityRef,
    pub noise_flag: NoiseFlag,
    pub actor_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaSnapshot {
    pub date: Date,
    pub persona: PersonaState,
}

/// An ordered multi-year event log for one user. Intra-day order is the
/// position in `events`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorTrace {
    pub user_id: String,
    pub events: Vec<BehaviorEvent>,
    pub persona_history: Vec<PersonaSnapshot>,
}

impl BehaviorTrace {
    /// Persona snapshot in effect on `date`: the latest one dated on or before it.
    pub fn persona_at(&self, date: Date) -> Option<&PersonaState> {
        let idx = self.persona_history.partition_point(|s| s.date <= date);
        idx.checked_sub(1).map(|i| &self.persona_history[i].persona)
    }

    pub fn clean_events(&self) -> impl Iterator<Item = &BehaviorEvent> {
        self.events.iter().filter(|e| e.noise_flag.is_clean())
    }
}
