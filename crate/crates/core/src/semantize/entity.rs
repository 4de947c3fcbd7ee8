use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::sim::catalog::Catalog;
use crate::sim::types::{BehaviorEvent, Platform};

/// An entity as a platform exposes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub entity_id: String,
    pub source: Platform,
    pub raw_title: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedEntity {
    pub core: String,
    /// At most three, most salient first.
    pub modifiers: Vec<String>,
    pub source_entity_id: String,
    /// Leaf category, when any source knows it.
    #[serde(default)]
    pub category: Option<String>,
}

impl RefinedEntity {
    pub const MAX_MODIFIERS: usize = 3;

    /// Display form: modifiers then core, space separated. Commas are
    /// replaced so the result is always a valid MUB item.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for part in self.modifiers.iter().chain(core::iter::once(&self.core)) {
            for w in part.split(|c: char| c.is_whitespace() || c == ',' || c == '|') {
                if w.is_empty() {
                    continue;
                }
                if !s.is_empty() {
                    s.push(' ');
                }
                s.push_str(w);
            }
        }
        s
    }
}

/// Internal metadata keyed by entity id, in display order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub rows: BTreeMap<String, Vec<(String, String)>>,
}

impl KnowledgeBase {
    pub fn get(&self, entity_id: &str) -> Option<&[(String, String)]> {
        self.rows.get(entity_id).map(Vec::as_slice)
    }

    pub fn value(&self, entity_id: &str, key: &str) -> Option<&str> {
        self.get(entity_id)?
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Native entity metadata plus the knowledge base, as semantization sees them.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EntityStore {
    pub entities: BTreeMap<String, Entity>,
    pub kb: KnowledgeBase,
}

impl EntityStore {
    pub fn from_catalog(catalog: &Catalog) -> Self {
        let mut s = Self::default();
        for it in &catalog.items {
            s.entities.insert(
                it.entity_id.clone(),
                Entity {
                    entity_id: it.entity_id.clone(),
                    source: it.platform,
                    raw_title: it.title.clone(),
                    metadata: it.metadata.clone(),
                },
            );
            if !it.kb.is_empty() {
                s.kb.rows.insert(it.entity_id.clone(), it.kb.clone());
            }
        }
        s
    }

    /// The entity behind an event; unknown ids get an entity with only the
    /// logged title.
    pub fn entity_for(&self, e: &BehaviorEvent) -> Entity {
        self.entities
            .get(&e.entity.entity_id)
            .cloned()
            .unwrap_or_else(|| Entity {
                entity_id: e.entity.entity_id.clone(),
                source: e.platform,
                raw_title: e.entity.title.clone(),
                metadata: BTreeMap::new(),
            })
    }
}
