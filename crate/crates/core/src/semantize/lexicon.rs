//! The refiner's vocabulary: product cores, modifiers and brands, each with
//! surface aliases, indexed for longest-match lookup over word sequences.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::words;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreEntry {
    pub canonical: String,
    pub category: String,
    /// Audience modifiers are meaningful for this product (apparel).
    #[serde(default)]
    pub audience_core: bool,
    #[serde(default)]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierEntry {
    pub canonical: String,
    pub priority: u8,
    #[serde(default)]
    pub audience: bool,
    #[serde(default)]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hit {
    Core(usize),
    Modifier(usize),
    Brand(usize),
    /// Promotional filler with no descriptive value.
    Stop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "LexiconTables", into = "LexiconTables")]
pub struct Lexicon {
    pub cores: Vec<CoreEntry>,
    pub modifiers: Vec<ModifierEntry>,
    pub brands: Vec<String>,
    pub stop_patterns: Vec<String>,
    index: BTreeMap<Vec<String>, Hit>,
    max_len: usize,
}

#[derive(Serialize, Deserialize)]
struct LexiconTables {
    cores: Vec<CoreEntry>,
    modifiers: Vec<ModifierEntry>,
    brands: Vec<String>,
    #[serde(default)]
    stop_patterns: Vec<String>,
}

impl From<LexiconTables> for Lexicon {
    fn from(t: LexiconTables) -> Self {
        Self::new(t.cores, t.modifiers, t.brands, t.stop_patterns)
    }
}

impl From<Lexicon> for LexiconTables {
    fn from(l: Lexicon) -> Self {
        Self {
            cores: l.cores,
            modifiers: l.modifiers,
            brands: l.brands,
            stop_patterns: l.stop_patterns,
        }
    }
}

impl Lexicon {
    /// Indexes every canonical form and alias. On collisions cores win over
    /// brands, brands over modifiers, modifiers over stop patterns, earlier
    /// entries over later ones.
    pub fn new(
        cores: Vec<CoreEntry>,
        modifiers: Vec<ModifierEntry>,
        brands: Vec<String>,
        stop_patterns: Vec<String>,
    ) -> Self {
        let mut index = BTreeMap::new();
        let mut max_len = 0;
        let mut add = |phrase: &str, hit: Hit| {
            let w = words(phrase);
            if w.is_empty() {
                return;
            }
            max_len = max_len.max(w.len());
            index.entry(w).or_insert(hit);
        };
        for (i, c) in cores.iter().enumerate() {
            add(&c.canonical, Hit::Core(i));
            for a in &c.aliases {
                add(a, Hit::Core(i));
            }
        }
        for (i, b) in brands.iter().enumerate() {
            add(b, Hit::Brand(i));
        }
        for (i, m) in modifiers.iter().enumerate() {
            add(&m.canonical, Hit::Modifier(i));
            for a in &m.aliases {
                add(a, Hit::Modifier(i));
            }
        }
        for s in &stop_patterns {
            add(s, Hit::Stop);
        }
        Self {
            cores,
            modifiers,
            brands,
            stop_patterns,
            index,
            max_len,
        }
    }

    pub fn builtin() -> Self {
        let mut cores: Vec<CoreEntry> = Vec::new();
        for p in vocab::PRODUCTS {
            if cores.iter().any(|c| c.canonical == p.core) {
                continue;
            }
            cores.push(CoreEntry {
                canonical: p.core.to_string(),
                category: p.category.to_string(),
                audience_core: p.audience_core,
                aliases: p.aliases.iter().map(|s| s.to_string()).collect(),
            });
        }
        for room in vocab::ROOM_TYPES {
            cores.push(CoreEntry {
                canonical: room.to_string(),
                category: "hotel".into(),
                audience_core: false,
                aliases: Vec::new(),
            });
        }
        let modifiers = vocab::MODIFIERS
            .iter()
            .map(|m| ModifierEntry {
                canonical: m.canonical.to_string(),
                priority: m.priority,
                audience: m.audience,
                aliases: m.aliases.iter().map(|s| s.to_string()).collect(),
            })
            .collect();
        let brands = vocab::BRANDS.iter().map(|s| s.to_string()).collect();
        use vocab::noise;
        let stop = [noise::SEASONS, noise::FRESHNESS, noise::BAIT, noise::FLUFF, noise::FILLER, noise::PACKS]
            .iter()
            .flat_map(|l| l.iter().map(|s| s.to_string()))
            .collect();
        Self::new(cores, modifiers, brands, stop)
    }

    /// Longest phrase starting at `words[i]`, with its length in words.
    pub fn longest_at(&self, words: &[String], i: usize) -> Option<(Hit, usize)> {
        let top = self.max_len.min(words.len() - i);
        (1..=top)
            .rev()
            .find_map(|l| self.index.get(&words[i..i + l]).map(|h| (*h, l)))
    }

    /// Brands never outrank the other modifiers' most salient tier.
    pub const BRAND_PRIORITY: u8 = 0;
}
