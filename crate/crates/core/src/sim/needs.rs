//! Latent needs (the Consumption Desire Library) and intent crystallization.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::env::EnvironmentState;
use super::error::{config_err, SimError};
use super::persona::{CityTier, Gender, LifeStage, PersonaState};
use super::types::{ActionType, Capabilities, Platform};

/// Predicate over `(PersonaState, EnvironmentState)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Always,
    Never,
    AgeBetween { min: i32, max: i32 },
    Gender(Gender),
    LifeStageIn(Vec<LifeStage>),
    Student,
    /// Some child aged in `[min, max)` months.
    HasChildAgedMonths { min: i32, max: i32 },
    Expecting,
    NeedTag(String),
    EventActive(String),
    CityTierIn(Vec<CityTier>),
    All(Vec<Condition>),
    Any(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    pub fn holds(&self, p: &PersonaState, env: &EnvironmentState) -> bool {
        match self {
            Self::Always => true,
            Self::Never => false,
            Self::AgeBetween { min, max } => {
                let a = p.age_at(env.date);
                *min <= a && a <= *max
            }
            Self::Gender(g) => p.demographics.gender == *g,
            Self::LifeStageIn(stages) => stages.contains(&p.life_stage),
            Self::Student => p.is_student == super::persona::Tri::Yes,
            Self::HasChildAgedMonths { min, max } => p.has_child_aged_months(env.date, *min, *max),
            Self::Expecting => p.is_expecting(),
            Self::NeedTag(t) => p.consumption_needs.contains(t),
            Self::EventActive(t) => env.events.contains(t),
            Self::CityTierIn(tiers) => tiers.contains(&p.demographics.city_tier),
            Self::All(cs) => cs.iter().all(|c| c.holds(p, env)),
            Self::Any(cs) => cs.iter().any(|c| c.holds(p, env)),
            Self::Not(c) => !c.holds(p, env),
        }
    }

    /// True when the predicate reads nothing but the persona.
    pub fn is_persona_only(&self) -> bool {
        match self {
            Self::EventActive(_) => false,
            Self::All(cs) | Self::Any(cs) => cs.iter().all(Condition::is_persona_only),
            Self::Not(c) => c.is_persona_only(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentNeed {
    pub need_id: String,
    pub category: String,
    pub activation_condition: Condition,
    /// Half-life, in days, of the satisfaction left by the last fulfilment.
    pub decay_half_life_days: f64,
    /// Daily probability that a fully unsatisfied active need becomes an intent.
    pub base_rate: f64,
    /// Multiplier applied to `base_rate` on shopping-festival days.
    #[serde(default = "one")]
    pub festival_boost: f64,
}

fn one() -> f64 {
    1.0
}

impl LatentNeed {
    /// Remaining urge, in `[0,1]`, `days_since` days after the last fulfilment.
    pub fn urge(&self, days_since: Option<i64>) -> f64 {
        match days_since {
            None => 1.0,
            Some(d) if self.decay_half_life_days <= 0.0 => {
                if d > 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Some(d) => 1.0 - libm::exp2(-(d.max(0) as f64) / self.decay_half_life_days),
        }
    }
}

pub fn validate_library(library: &[LatentNeed]) -> Result<(), SimError> {
    let mut seen = alloc::collections::BTreeSet::new();
    for n in library {
        if !seen.insert(n.need_id.as_str()) {
            return Err(config_err(format!("duplicate need_id '{}'", n.need_id)));
        }
        if !(0.0..=1.0).contains(&n.base_rate) {
            return Err(config_err(format!("need '{}': base_rate outside [0,1]", n.need_id)));
        }
    }
    Ok(())
}

/// Needs whose activation condition holds, in library order.
pub fn activate_needs<'a>(
    persona: &PersonaState,
    env: &EnvironmentState,
    library: &'a [LatentNeed],
) -> Vec<&'a LatentNeed> {
    library
        .iter()
        .filter(|n| n.activation_condition.holds(persona, env))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Fulfilled,
    Abandoned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecificIntent {
    pub need_id: String,
    pub platform: Platform,
    pub action_type: ActionType,
    pub target_category: String,
    pub expected_outcome: Outcome,
}

/// Category → platforms an intent in that category can target.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlatformRouting {
    pub routes: BTreeMap<String, Vec<Platform>>,
}

impl PlatformRouting {
    pub fn platforms(&self, category: &str) -> &[Platform] {
        self.routes.get(category).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// The terminal action an intent on `platform` aims for.
pub fn terminal_action(platform: Platform) -> ActionType {
    match platform {
        Platform::Poi => ActionType::Visit,
        _ => ActionType::Purchase,
    }
}

pub fn crystallize_intent<R: Rng + ?Sized>(
    need: &LatentNeed,
    routing: &PlatformRouting,
    capabilities: &Capabilities,
    fulfil_probability: f64,
    rng: &mut R,
) -> Result<SpecificIntent, SimError> {
    let candidates: Vec<Platform> = routing
        .platforms(&need.category)
        .iter()
        .copied()
        .filter(|p| capabilities.supports(*p, terminal_action(*p)))
        .collect();
    if candidates.is_empty() {
        return Err(config_err(format!(
            "need '{}': category '{}' routes to no capable platform",
            need.need_id, need.category
        )));
    }
    let platform = candidates[rng.gen_range(0..candidates.len())];
    let expected_outcome = if rng.gen::<f64>() < fulfil_probability {
        Outcome::Fulfilled
    } else {
        Outcome::Abandoned
    };
    Ok(SpecificIntent {
        need_id: need.need_id.clone(),
        platform,
        action_type: terminal_action(platform),
        target_category: need.category.clone(),
        expected_outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::parse_day;
    use crate::rng::seeded;
    use crate::sim::env::Calendar;
    use crate::sim::persona::{BigFive, Child, Demographics, Household, Region, Tri};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn persona() -> PersonaState {
        PersonaState {
            user_id: "u1".into(),
            demographics: Demographics {
                birth_date: parse_day("1994-03-01").unwrap(),
                gender: Gender::Female,
                city_tier: CityTier::Tier1,
                region: Region::East,
            },
            traits: BigFive::neutral(),
            consumption_needs: BTreeSet::new(),
            life_stage: LifeStage::FamilyOriented,
            household: Household {
                children: vec![Child {
                    birth_date: parse_day("2024-01-10").unwrap(),
                    gender: Gender::Male,
                }],
            },
            dynamic_preferences: BTreeMap::new(),
            occupation: "teacher".into(),
            is_student: Tri::No,
            pending_birth: None,
        }
    }

    fn need(id: &str, category: &str, cond: Condition) -> LatentNeed {
        LatentNeed {
            need_id: id.into(),
            category: category.into(),
            activation_condition: cond,
            decay_half_life_days: 7.0,
            base_rate: 0.5,
            festival_boost: 1.0,
        }
    }

    #[test]
    fn infant_activates_baby_care() {
        let cal = Calendar::default();
        let env = EnvironmentState::new(parse_day("2024-04-01").unwrap(), &cal, Vec::new());
        let lib = vec![
            need("baby-care", "baby-care", Condition::HasChildAgedMonths { min: 0, max: 36 }),
            need("retire", "health", Condition::LifeStageIn(vec![LifeStage::Retired])),
        ];
        let active = activate_needs(&persona(), &env, &lib);
        assert_eq!(active.len(), 1);
        assert_eq!(active[0].need_id, "baby-care");
        assert!(activate_needs(&persona(), &env, &[]).is_empty());
    }

    #[test]
    fn festival_needs_follow_calendar() {
        let cal = Calendar::default();
        let lib = vec![need("stock-up", "groceries", Condition::EventActive("618".into()))];
        let off = EnvironmentState::new(parse_day("2024-05-01").unwrap(), &cal, Vec::new());
        let on = EnvironmentState::new(parse_day("2024-06-10").unwrap(), &cal, Vec::new());
        assert!(activate_needs(&persona(), &off, &lib).is_empty());
        assert_eq!(activate_needs(&persona(), &on, &lib).len(), 1);
    }

    #[test]
    fn crystallized_intent_is_capable() {
        let mut routing = PlatformRouting::default();
        routing
            .routes
            .insert("dining".into(), vec![Platform::Delivery, Platform::Poi]);
        let caps = Capabilities::default();
        let n = need("eat-out", "dining", Condition::Always);
        let mut rng = seeded(3);
        for _ in 0..200 {
            let i = crystallize_intent(&n, &routing, &caps, 0.8, &mut rng).unwrap();
            assert!(caps.supports(i.platform, i.action_type));
            assert_eq!(i.target_category, "dining");
        }
        let orphan = need("x", "nowhere", Condition::Always);
        assert!(matches!(
            crystallize_intent(&orphan, &routing, &caps, 0.8, &mut rng),
            Err(SimError::Config(_))
        ));
    }

    #[test]
    fn urge_recovers_with_half_life() {
        let n = need("x", "y", Condition::Always);
        assert_eq!(n.urge(None), 1.0);
        assert_eq!(n.urge(Some(0)), 0.0);
        assert!((n.urge(Some(7)) - 0.5).abs() < 1e-12);
    }
}
