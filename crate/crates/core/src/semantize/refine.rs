//! Entity refinement: rewrite noisy titles into a core plus up to three
//! modifiers, and enrich sparse ones from the knowledge base.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::entity::{Entity, KnowledgeBase, RefinedEntity};
use super::lexicon::{Hit, Lexicon};
use crate::text::{count_tokens, tokens, words};

/// Anything that can turn a raw entity into its refined form. The rule engine
/// below is the default; a learned model can be plugged in instead.
pub trait Refiner {
    fn refine(&self, entity: &Entity, kb: &KnowledgeBase) -> RefinedEntity;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefinerConfig {
    /// Titles with at most this many tokens and no category are sparse.
    pub sparse_max_tokens: usize,
    /// Knowledge-base keys that become modifiers, in priority order.
    pub enrich_keys: Vec<String>,
}

impl Default for RefinerConfig {
    fn default() -> Self {
        Self {
            sparse_max_tokens: 4,
            enrich_keys: ["location", "tier", "brand"].iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleRefiner {
    pub lexicon: Lexicon,
    pub config: RefinerConfig,
}

impl Default for RuleRefiner {
    fn default() -> Self {
        Self {
            lexicon: Lexicon::builtin(),
            config: RefinerConfig::default(),
        }
    }
}

struct Word {
    lower: String,
    start: usize,
    end: usize,
    segment: usize,
}

fn split_words(text: &str) -> Vec<Word> {
    let base = text.as_ptr() as usize;
    let mut out = Vec::new();
    let mut segment = 0;
    for t in tokens(text) {
        let start = t.as_ptr() as usize - base;
        if t == "," {
            segment += 1;
        } else if t.chars().next().is_some_and(char::is_alphanumeric) {
            out.push(Word {
                lower: t.to_lowercase(),
                start,
                end: start + t.len(),
                segment,
            });
        }
    }
    out
}

struct Match {
    hit: Hit,
    at: usize,
    len: usize,
}

impl RuleRefiner {
    pub fn new(lexicon: Lexicon, config: RefinerConfig) -> Self {
        Self { lexicon, config }
    }

    pub fn is_sparse(&self, e: &Entity) -> bool {
        count_tokens(&e.raw_title) <= self.config.sparse_max_tokens
            && !e.metadata.contains_key("category")
    }

    /// The rewrite path alone: never longer than the raw title.
    pub fn rewrite(&self, e: &Entity) -> RefinedEntity {
        let raw = e.raw_title.trim();
        let ws = split_words(raw);
        let lower: Vec<String> = ws.iter().map(|w| w.lower.clone()).collect();
        let mut matches = Vec::new();
        let mut i = 0;
        while i < lower.len() {
            match self.lexicon.longest_at(&lower, i) {
                Some((hit, len)) => {
                    matches.push(Match { hit, at: i, len });
                    i += len;
                }
                None => i += 1,
            }
        }

        let core_match = matches.iter().find(|m| matches!(m.hit, Hit::Core(_)));
        let core_entry = core_match.map(|m| match m.hit {
            Hit::Core(c) => &self.lexicon.cores[c],
            _ => unreachable!(),
        });
        let core = match (core_match, core_entry) {
            (Some(m), Some(entry)) => {
                let span = &raw[ws[m.at].start..ws[m.at + m.len - 1].end];
                if words(&entry.canonical) == lower[m.at..m.at + m.len]
                    || entry.canonical.len() > raw.len()
                {
                    span.to_string()
                } else {
                    entry.canonical.clone()
                }
            }
            _ => residual_core(raw, &ws, &matches),
        };

        let keep_audience = core_entry.is_some_and(|c| c.audience_core);
        let mut mods: Vec<(u8, usize, &str)> = Vec::new();
        for m in &matches {
            let (priority, name, audience) = match m.hit {
                Hit::Modifier(k) => {
                    let e = &self.lexicon.modifiers[k];
                    (e.priority, e.canonical.as_str(), e.audience)
                }
                Hit::Brand(k) => (Lexicon::BRAND_PRIORITY, self.lexicon.brands[k].as_str(), false),
                _ => continue,
            };
            if (audience && !keep_audience) || mods.iter().any(|(_, _, n)| *n == name) {
                continue;
            }
            mods.push((priority, m.at, name));
        }
        mods.sort_by_key(|(p, at, _)| (*p, *at));
        mods.truncate(RefinedEntity::MAX_MODIFIERS);

        let mut out = RefinedEntity {
            core,
            modifiers: mods.into_iter().map(|(_, _, n)| n.to_string()).collect(),
            source_entity_id: e.entity_id.clone(),
            category: e
                .metadata
                .get("category")
                .cloned()
                .or_else(|| core_entry.map(|c| c.category.clone())),
        };
        while !out.modifiers.is_empty() && out.render().chars().count() > raw.chars().count() {
            out.modifiers.pop();
        }
        out
    }
}

/// Without a known core, the first comma segment minus recognised modifiers,
/// brands, filler and bare numbers.
fn residual_core(raw: &str, ws: &[Word], matches: &[Match]) -> String {
    let mut covered = alloc::vec![false; ws.len()];
    for m in matches {
        for c in &mut covered[m.at..m.at + m.len] {
            *c = true;
        }
    }
    let mut parts: Vec<&str> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for (i, w) in ws.iter().enumerate() {
        let keep = w.segment == 0 && !covered[i] && !w.lower.chars().all(|c| c.is_ascii_digit());
        match (keep, run) {
            (true, Some((s, _))) => run = Some((s, w.end)),
            (true, None) => run = Some((w.start, w.end)),
            (false, Some((s, e))) => {
                parts.push(&raw[s..e]);
                run = None;
            }
            (false, None) => {}
        }
    }
    if let Some((s, e)) = run {
        parts.push(&raw[s..e]);
    }
    if parts.is_empty() {
        let first = raw.split(',').next().unwrap_or(raw).trim();
        return if first.is_empty() { raw.to_string() } else { first.to_string() };
    }
    parts.join(" ")
}

impl Refiner for RuleRefiner {
    fn refine(&self, e: &Entity, kb: &KnowledgeBase) -> RefinedEntity {
        let mut out = self.rewrite(e);
        if !e.metadata.contains_key("category") {
            if let Some(c) = kb.value(&e.entity_id, "category") {
                out.category = Some(c.to_string());
            }
        }
        if !self.is_sparse(e) {
            return out;
        }
        let Some(row) = kb.get(&e.entity_id) else {
            log::warn!("sparse entity {} has no knowledge-base row", e.entity_id);
            return out;
        };
        let mut mods: Vec<String> = Vec::new();
        for key in &self.config.enrich_keys {
            if let Some((_, v)) = row.iter().find(|(k, _)| k == key) {
                mods.push(v.clone());
            }
        }
        for m in out.modifiers.drain(..) {
            mods.push(m);
        }
        let mut seen: Vec<String> = Vec::new();
        mods.retain(|m| {
            let fresh = !seen.contains(m) && !m.trim().is_empty();
            seen.push(m.clone());
            fresh
        });
        mods.truncate(RefinedEntity::MAX_MODIFIERS);
        out.modifiers = mods;
        out
    }
}
