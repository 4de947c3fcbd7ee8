//! The entity catalog: every item a simulated user can touch, with its raw
//! (noisy or sparse) title, native platform metadata and knowledge-base row.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::env::Poi;
use super::persona::{PersonaState, Region};
use super::types::Platform;
use crate::date::Date;
use crate::rng::seeded;
use crate::vocab::{self, noise, ProductSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub entity_id: String,
    pub platform: Platform,
    /// Leaf category.
    pub category: String,
    pub title: String,
    /// Metadata the platform itself exposes; empty for sparse entities.
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    /// Internal knowledge-base row, in display order.
    #[serde(default)]
    pub kb: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula_stage: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Catalog {
    pub items: Vec<CatalogItem>,
    #[serde(skip)]
    index: BTreeMap<String, BTreeMap<Platform, Vec<usize>>>,
    #[serde(skip)]
    by_id: BTreeMap<String, usize>,
}

/// Formula stage suited to a child of `months` months.
pub fn formula_stage_for_age(months: i32) -> Option<u8> {
    match months {
        0..=5 => Some(1),
        6..=11 => Some(2),
        12..=35 => Some(3),
        _ => None,
    }
}

impl Catalog {
    pub fn new(items: Vec<CatalogItem>) -> Self {
        let mut c = Self {
            items,
            index: BTreeMap::new(),
            by_id: BTreeMap::new(),
        };
        c.reindex();
        c
    }

    fn reindex(&mut self) {
        self.index.clear();
        self.by_id.clear();
        for (i, it) in self.items.iter().enumerate() {
            self.index
                .entry(it.category.clone())
                .or_default()
                .entry(it.platform)
                .or_default()
                .push(i);
            self.by_id.insert(it.entity_id.clone(), i);
        }
    }

    pub fn get(&self, entity_id: &str) -> Option<&CatalogItem> {
        self.by_id.get(entity_id).map(|i| &self.items[*i])
    }

    pub fn categories(&self) -> impl Iterator<Item = (&str, Platform)> {
        self.index
            .iter()
            .flat_map(|(c, m)| m.keys().map(move |p| (c.as_str(), *p)))
    }

    pub fn has(&self, category: &str, platform: Platform) -> bool {
        self.index.get(category).is_some_and(|m| m.contains_key(&platform))
    }

    /// The POIs of one region, as the environment lists them.
    pub fn pois(&self, region: Region) -> Vec<Poi> {
        self.items
            .iter()
            .filter(|i| i.region == Some(region))
            .map(|i| Poi {
                poi_id: i.entity_id.clone(),
                kind: i.category.clone(),
                location: i
                    .kb
                    .iter()
                    .find(|(k, _)| k == "location")
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default(),
            })
            .collect()
    }

    /// A random item of `category` on `platform` suitable for `persona` on `date`.
    pub fn pick<R: Rng + ?Sized>(
        &self,
        category: &str,
        platform: Platform,
        persona: &PersonaState,
        date: Date,
        rng: &mut R,
    ) -> Option<&CatalogItem> {
        let idx = self.index.get(category)?.get(&platform)?;
        let youngest_stage = persona
            .child_ages_months(date)
            .min()
            .and_then(formula_stage_for_age);
        let candidates: Vec<usize> = idx
            .iter()
            .copied()
            .filter(|i| {
                let it = &self.items[*i];
                let region_ok = it.region.is_none_or(|r| r == persona.demographics.region);
                let stage_ok = it.formula_stage.is_none() || it.formula_stage == youngest_stage;
                region_ok && stage_ok
            })
            .collect();
        candidates.choose(rng).map(|i| &self.items[*i])
    }

    /// Any item, for noise injection.
    pub fn random_item<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&CatalogItem> {
        self.items.choose(rng)
    }

    /// The built-in catalog, a pure function of `seed`.
    pub fn builtin(seed: u64, variants_per_product: usize) -> Self {
        let mut rng = seeded(seed);
        let mut items = Vec::new();
        let mut n_ec = 0;
        let mut n_dl = 0;
        for spec in vocab::PRODUCTS {
            for _ in 0..variants_per_product.max(1) {
                let mut metadata = BTreeMap::new();
                metadata.insert("category".to_string(), spec.category.to_string());
                if let Some(s) = spec.formula_stage {
                    metadata.insert("stage".to_string(), s.to_string());
                }
                let (entity_id, title) = match spec.platform {
                    Platform::Delivery => {
                        n_dl += 1;
                        (format!("dl-{n_dl:04}"), delivery_title(spec, &mut rng))
                    }
                    _ => {
                        n_ec += 1;
                        (format!("ec-{n_ec:04}"), noisy_title(spec, &mut rng))
                    }
                };
                items.push(CatalogItem {
                    entity_id,
                    platform: spec.platform,
                    category: spec.category.to_string(),
                    title,
                    metadata,
                    kb: Vec::new(),
                    formula_stage: spec.formula_stage,
                    region: None,
                });
            }
        }
        let mut n_ota = 0;
        for dest in vocab::DESTINATIONS {
            for _ in 0..2 {
                n_ota += 1;
                let view = vocab::ROOM_VIEWS.choose(&mut rng).unwrap();
                let room = vocab::ROOM_TYPES.choose(&mut rng).unwrap();
                let tier = vocab::HOTEL_TIERS.choose(&mut rng).unwrap();
                items.push(CatalogItem {
                    entity_id: format!("ota-{n_ota:04}"),
                    platform: Platform::Ota,
                    category: "hotel".into(),
                    title: format!("{view} {room}"),
                    metadata: BTreeMap::new(),
                    kb: alloc::vec![
                        ("location".into(), (*dest).into()),
                        ("tier".into(), (*tier).into()),
                        ("category".into(), "hotel".into()),
                    ],
                    formula_stage: None,
                    region: None,
                });
            }
        }
        for (i, name) in vocab::ATTRACTIONS.iter().enumerate() {
            n_ota += 1;
            let dest = vocab::DESTINATIONS[i % vocab::DESTINATIONS.len()];
            items.push(CatalogItem {
                entity_id: format!("ota-{n_ota:04}"),
                platform: Platform::Ota,
                category: "attraction-ticket".into(),
                title: (*name).into(),
                metadata: BTreeMap::new(),
                kb: alloc::vec![
                    ("location".into(), dest.into()),
                    ("category".into(), "attraction-ticket".into()),
                ],
                formula_stage: None,
                region: None,
            });
        }
        let mut n_poi = 0;
        for region in Region::ALL {
            for (kind, category, suffix) in vocab::POI_KINDS {
                for prefix in vocab::POI_PREFIXES.iter().take(2) {
                    n_poi += 1;
                    let district = vocab::POI_PREFIXES.choose(&mut rng).unwrap();
                    items.push(CatalogItem {
                        entity_id: format!("poi-{n_poi:04}"),
                        platform: Platform::Poi,
                        category: (*category).into(),
                        title: format!("{prefix} {suffix}"),
                        metadata: BTreeMap::new(),
                        kb: alloc::vec![
                            (
                                "location".into(),
                                format!("{district} District {}", capitalize(region.name()))
                            ),
                            ("type".into(), capitalize(kind)),
                            ("category".into(), (*category).into()),
                        ],
                        formula_stage: None,
                        region: Some(region),
                    });
                }
            }
        }
        Self::new(items)
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn alias_of<'a, R: Rng + ?Sized>(canonical: &'a str, aliases: &[&'a str], rng: &mut R) -> &'a str {
    if aliases.is_empty() || rng.gen_bool(0.25) {
        canonical
    } else {
        aliases.choose(rng).unwrap()
    }
}

fn modifier_alias<R: Rng + ?Sized>(canonical: &str, rng: &mut R) -> String {
    vocab::MODIFIERS
        .iter()
        .find(|m| m.canonical == canonical)
        .and_then(|m| m.aliases.choose(rng).copied())
        .unwrap_or(canonical)
        .to_string()
}

/// A marketing-heavy e-commerce title built from the noise patterns of
/// real listings: season/novelty prefix, brand, stacked descriptors, the
/// product noun, audience bait, synonym filler, style fluff and pack spam.
pub fn noisy_title<R: Rng + ?Sized>(spec: &ProductSpec, rng: &mut R) -> String {
    let mut head: Vec<String> = Vec::new();
    if rng.gen_bool(0.7) {
        head.push(format!(
            "{} {} {}",
            rng.gen_range(2019..=2025),
            noise::SEASONS.choose(rng).unwrap(),
            noise::FRESHNESS.choose(rng).unwrap()
        ));
    }
    if !spec.brands.is_empty() && rng.gen_bool(0.8) {
        head.push(spec.brands.choose(rng).unwrap().to_string());
    }
    let mut mods: Vec<&str> = spec.modifiers.to_vec();
    mods.shuffle(rng);
    let k = rng.gen_range(1..=mods.len().clamp(1, 4)).min(mods.len());
    for m in &mods[..k] {
        head.push(modifier_alias(m, rng));
    }
    head.push(alias_of(spec.core, spec.aliases, rng).to_string());
    if !spec.audience_core && rng.gen_bool(0.5) {
        head.push(noise::BAIT.choose(rng).unwrap().to_string());
    }
    let mut parts = alloc::vec![head.join(" ")];
    for _ in 0..rng.gen_range(1..=2) {
        parts.push(noise::FILLER.choose(rng).unwrap().to_string());
    }
    for _ in 0..rng.gen_range(1..=3) {
        parts.push(noise::FLUFF.choose(rng).unwrap().to_string());
    }
    if rng.gen_bool(0.5) {
        parts.push(noise::PACKS.choose(rng).unwrap().to_string());
    }
    parts.join(", ")
}

fn delivery_title<R: Rng + ?Sized>(spec: &ProductSpec, rng: &mut R) -> String {
    let mut s = String::new();
    if let Some(b) = spec.brands.choose(rng) {
        s.push_str(b);
        s.push(' ');
    }
    s.push_str(spec.core);
    let mut mods: Vec<String> = Vec::new();
    for m in spec.modifiers {
        if rng.gen_bool(0.6) {
            mods.push(modifier_alias(m, rng));
        }
    }
    if !mods.is_empty() {
        s.push_str(" (");
        s.push_str(&mods.join(", "));
        s.push(')');
    }
    if rng.gen_bool(0.4) {
        s.push_str(" hot sale");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::count_tokens;

    #[test]
    fn builtin_is_deterministic_and_indexed() {
        let a = Catalog::builtin(9, 3);
        let b = Catalog::builtin(9, 3);
        assert_eq!(a.items, b.items);
        assert!(a.get("ec-0001").is_some());
        assert!(a.has("hotel", Platform::Ota));
        assert!(a.has("dining-venue", Platform::Poi));
        let ids: alloc::collections::BTreeSet<_> = a.items.iter().map(|i| &i.entity_id).collect();
        assert_eq!(ids.len(), a.items.len());
    }

    #[test]
    fn noisy_titles_are_long_and_sparse_titles_short() {
        let c = Catalog::builtin(1, 4);
        for it in &c.items {
            match it.platform {
                Platform::ECommerce => assert!(count_tokens(&it.title) >= 6, "{}", it.title),
                Platform::Ota | Platform::Poi => {
                    assert!(count_tokens(&it.title) <= 4, "{}", it.title);
                    assert!(it.metadata.is_empty());
                }
                Platform::Delivery => {}
            }
        }
    }

    #[test]
    fn stages_follow_child_age() {
        assert_eq!(formula_stage_for_age(0), Some(1));
        assert_eq!(formula_stage_for_age(6), Some(2));
        assert_eq!(formula_stage_for_age(35), Some(3));
        assert_eq!(formula_stage_for_age(36), None);
    }
}
