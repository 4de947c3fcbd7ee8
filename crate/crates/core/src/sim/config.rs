//! The simulator's config bundle and its shipped defaults.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use super::env::Calendar;
use super::error::{config_err, SimError};
use super::evolve::LifeEventTable;
use super::mdp::{default_transition_rows, TransitionTable};
use super::needs::{terminal_action, validate_library, Condition, LatentNeed, PlatformRouting};
use super::noise::NoiseConfig;
use super::persona::{LifeStage, PersonaRules};
use super::population::{default_population_rows, PopulationConfig};
use super::qa::{default_category_rules, CategoryRule};
use super::types::{Capabilities, Platform};
use crate::date::Date;
use crate::vocab;

/// Scalar engine knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub start: Date,
    /// MDP steps per simulated day.
    pub steps_per_day: u32,
    /// Probability a crystallized intent ends in its terminal action.
    pub fulfil_probability: f64,
    /// Days an unfinished intent survives.
    pub intent_ttl_days: i64,
    /// Days between behavior-driven preference updates.
    pub evolution_period_days: i64,
    pub preference_cap: f64,
    pub catalog_seed: u64,
    pub catalog_variants: usize,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            start: Date::from_ymd_opt(2022, 1, 1).unwrap(),
            steps_per_day: 6,
            fulfil_probability: 0.85,
            intent_ttl_days: 7,
            evolution_period_days: 30,
            preference_cap: 0.1,
            catalog_seed: 7,
            catalog_variants: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub population: PopulationConfig,
    pub transitions: TransitionTable,
    pub library: Vec<LatentNeed>,
    pub routing: PlatformRouting,
    pub capabilities: Capabilities,
    pub life_events: LifeEventTable,
    pub noise: NoiseConfig,
    pub calendar: Calendar,
    pub category_rules: Vec<CategoryRule>,
    pub persona_rules: PersonaRules,
    pub engine: EngineParams,
}

impl SimConfig {
    /// The documented defaults every config file starts from.
    pub fn shipped() -> Self {
        let persona_rules = PersonaRules::default();
        Self {
            population: PopulationConfig::from_rows(
                &default_population_rows(),
                persona_rules.min_parental_gap_years,
            )
            .expect("shipped population table is valid"),
            transitions: TransitionTable::from_rows(&default_transition_rows())
                .expect("shipped transition table is valid"),
            library: default_library(),
            routing: default_routing(),
            capabilities: Capabilities::default(),
            life_events: LifeEventTable::default(),
            noise: NoiseConfig::shipped(),
            calendar: Calendar::default(),
            category_rules: default_category_rules(),
            persona_rules,
            engine: EngineParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        validate_library(&self.library)?;
        self.life_events.validate()?;
        self.noise.validate()?;
        self.population.validate()?;
        for n in &self.library {
            let ok = self
                .routing
                .platforms(&n.category)
                .iter()
                .any(|p| self.capabilities.supports(*p, terminal_action(*p)));
            if !ok {
                return Err(config_err(format!(
                    "need '{}': category '{}' routes to no capable platform",
                    n.need_id, n.category
                )));
            }
            for tag in event_tags(&n.activation_condition) {
                if !self.calendar.contains_tag(tag) {
                    return Err(config_err(format!(
                        "need '{}': event '{tag}' is not in the calendar",
                        n.need_id
                    )));
                }
            }
        }
        for r in &self.category_rules {
            if !r.condition.is_persona_only() {
                return Err(config_err(format!(
                    "category rule '{}' must only read the persona",
                    r.category
                )));
            }
        }
        let e = &self.engine;
        if e.steps_per_day == 0
            || !(0.0..=1.0).contains(&e.fulfil_probability)
            || e.intent_ttl_days < 0
            || e.evolution_period_days < 1
            || !(0.0..=1.0).contains(&e.preference_cap)
        {
            return Err(config_err("engine parameters out of range"));
        }
        Ok(())
    }

    pub fn catalog(&self) -> Catalog {
        Catalog::builtin(self.engine.catalog_seed, self.engine.catalog_variants)
    }
}

fn event_tags(c: &Condition) -> Vec<&str> {
    match c {
        Condition::EventActive(t) => alloc::vec![t.as_str()],
        Condition::All(cs) | Condition::Any(cs) => cs.iter().flat_map(event_tags).collect(),
        Condition::Not(c) => event_tags(c),
        _ => Vec::new(),
    }
}

/// Every catalog category routed to the platform that sells it.
pub fn default_routing() -> PlatformRouting {
    let mut routes: BTreeMap<String, Vec<Platform>> = BTreeMap::new();
    let mut add = |cat: &str, p: Platform| {
        let v = routes.entry(cat.into()).or_default();
        if !v.contains(&p) {
            v.push(p);
        }
    };
    for spec in vocab::PRODUCTS {
        add(spec.category, spec.platform);
    }
    add("hotel", Platform::Ota);
    add("attraction-ticket", Platform::Ota);
    for (_, cat, _) in vocab::POI_KINDS {
        add(cat, Platform::Poi);
    }
    PlatformRouting { routes }
}

pub fn default_library() -> Vec<LatentNeed> {
    use Condition::*;
    let need = |id: &str, category: &str, cond, hl, rate, boost| LatentNeed {
        need_id: id.into(),
        category: category.into(),
        activation_condition: cond,
        decay_half_life_days: hl,
        base_rate: rate,
        festival_boost: boost,
    };
    let tag = |t: &str| NeedTag(t.into());
    let infant = HasChildAgedMonths { min: 0, max: 36 };
    let holiday = Any(alloc::vec![
        EventActive("national-day".into()),
        EventActive("summer-holiday".into()),
        EventActive("spring-festival".into()),
    ]);
    alloc::vec![
        need("bubble-tea", "drinks", Always, 3.0, 0.15, 1.0),
        need("coffee-run", "drinks", tag("coffee"), 2.0, 0.25, 1.0),
        need("meal-delivery", "food-delivery", Always, 2.0, 0.2, 1.0),
        need("wardrobe", "apparel", Always, 45.0, 0.05, 3.0),
        need("skincare", "beauty", Any(alloc::vec![tag("beauty"), Condition::Gender(super::persona::Gender::Female)]), 30.0, 0.05, 2.5),
        need("gadgets", "electronics", AgeBetween { min: 14, max: 65 }, 120.0, 0.02, 3.0),
        need("pantry", "groceries", Not(Box::new(Student)), 14.0, 0.08, 2.0),
        need("home-upkeep", "home", Not(Box::new(Student)), 60.0, 0.03, 2.0),
        need("coursework", "books-study", Student, 30.0, 0.06, 1.0),
        need("leisure-reading", "books-study", tag("reading"), 40.0, 0.04, 1.5),
        need("school-supplies", "books-study", All(alloc::vec![Student, EventActive("back-to-school".into())]), 20.0, 0.2, 1.0),
        need("sports-gear", "outdoor-sports", tag("fitness"), 40.0, 0.04, 2.0),
        need("workout", "fitness-venue", tag("fitness"), 4.0, 0.12, 1.0),
        need("eat-out", "dining-venue", Always, 6.0, 0.08, 1.0),
        need("stroll", "outdoor-venue", Always, 10.0, 0.04, 1.0),
        need("mall-trip", "shopping-venue", Always, 14.0, 0.04, 1.5),
        need("exhibition", "culture-venue", tag("reading"), 60.0, 0.02, 1.0),
        need("getaway", "hotel", All(alloc::vec![tag("travel"), holiday.clone()]), 90.0, 0.05, 1.0),
        need("sightseeing", "attraction-ticket", All(alloc::vec![tag("travel"), holiday]), 90.0, 0.04, 1.0),
        need("pet-supplies", "pets", tag("pet-owner"), 20.0, 0.08, 1.5),
        need("health-check", "health", AgeBetween { min: 50, max: 120 }, 180.0, 0.02, 1.5),
        need("baby-care", "baby-care", Any(alloc::vec![infant.clone(), Expecting]), 7.0, 0.3, 1.5),
        need("baby-formula", "baby-formula", infant, 10.0, 0.35, 1.5),
        need("maternity", "maternity", Expecting, 20.0, 0.2, 1.0),
        need("early-learning", "kids-education", HasChildAgedMonths { min: 36, max: 216 }, 30.0, 0.06, 1.5),
        need("family-outing", "family-venue", HasChildAgedMonths { min: 24, max: 144 }, 14.0, 0.08, 1.0),
        need("date-night", "dining-venue", LifeStageIn(alloc::vec![LifeStage::InRelationship]), 10.0, 0.05, 1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_bundle_is_valid() {
        let c = SimConfig::shipped();
        c.validate().unwrap();
        let catalog = c.catalog();
        for n in &c.library {
            let routed = c.routing.platforms(&n.category);
            assert!(routed.iter().any(|p| catalog.has(&n.category, *p)), "{}", n.need_id);
        }
    }

    #[test]
    fn unknown_calendar_tag_rejected() {
        let mut c = SimConfig::shipped();
        c.library[0].activation_condition = Condition::EventActive("black-friday".into());
        assert!(c.validate().is_err());
    }
}
