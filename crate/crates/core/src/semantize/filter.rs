//! Three-stage entity filter: stop-word cores, category whitelist, then
//! text-complexity outliers.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::entity::RefinedEntity;
use crate::text::words;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// A core made only of these words carries no information.
    pub stop_words: BTreeSet<String>,
    /// Allowed leaf categories; `None` admits every category, including none.
    pub category_whitelist: Option<BTreeSet<String>>,
    pub min_core_chars: usize,
    pub max_core_chars: usize,
    /// Minimum share of alphanumeric or space characters in the core.
    pub min_alnum_ratio: f64,
    pub max_word_chars: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        let stop = ["thing", "things", "item", "items", "product", "goods", "other", "misc", "unknown", "n/a"];
        Self {
            stop_words: stop.iter().map(|s| s.to_string()).collect(),
            category_whitelist: Some(vocab::TAXONOMY.iter().map(|(leaf, _)| leaf.to_string()).collect()),
            min_core_chars: 2,
            max_core_chars: 60,
            min_alnum_ratio: 0.6,
            max_word_chars: 30,
        }
    }
}

impl FilterConfig {
    pub fn stop_only(&self, e: &RefinedEntity) -> bool {
        let w = words(&e.core);
        w.is_empty() || w.iter().all(|w| self.stop_words.contains(w))
    }

    pub fn whitelisted(&self, e: &RefinedEntity) -> bool {
        match &self.category_whitelist {
            None => true,
            Some(allowed) => e.category.as_ref().is_some_and(|c| allowed.contains(c)),
        }
    }

    pub fn plain_text(&self, e: &RefinedEntity) -> bool {
        let n = e.core.chars().count();
        if n < self.min_core_chars || n > self.max_core_chars {
            return false;
        }
        let ok = e
            .core
            .chars()
            .filter(|c| c.is_alphanumeric() || *c == ' ')
            .count();
        (ok as f64) >= self.min_alnum_ratio * n as f64
            && e.core.split_whitespace().all(|w| w.chars().count() <= self.max_word_chars)
    }

    pub fn keep(&self, e: &RefinedEntity) -> bool {
        !self.stop_only(e) && self.whitelisted(e) && self.plain_text(e)
    }
}

/// Entities passing every stage, in input order.
pub fn filter_entities(entities: Vec<RefinedEntity>, cfg: &FilterConfig) -> Vec<RefinedEntity> {
    entities.into_iter().filter(|e| cfg.keep(e)).collect()
}
