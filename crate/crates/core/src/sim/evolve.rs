//! Persona evolution: life events rewrite the core persona, periodic
//! feedback nudges dynamic preferences.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use super::error::{config_err, SimError};
use super::needs::Condition;
use super::persona::{Child, CityTier, Gender, LifeStage, PersonaState, Region, Tri};
use super::types::BehaviorEvent;
use crate::date::{add_days, Date};

/// What a life event does to the persona.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LifeEffect {
    /// Schedules a birth `gestation_days` after the trigger date.
    Pregnancy { gestation_days: i64 },
    /// Appends a newborn and moves the persona to the family stage.
    Birth,
    /// New city tier and a different region.
    Relocation,
    CareerChange { occupations: Vec<String> },
    StartRelationship,
    Graduation { occupations: Vec<String> },
    Retirement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifeEventRule {
    pub tag: String,
    pub effect: LifeEffect,
    /// Eligibility for spontaneous firing; scheduled events ignore it.
    pub condition: Condition,
    /// Daily firing probability for eligible personas; 0 for scheduled-only events.
    pub daily_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifeEventTable {
    pub rules: Vec<LifeEventRule>,
}

impl LifeEventTable {
    pub fn validate(&self) -> Result<(), SimError> {
        let mut seen = BTreeSet::new();
        for r in &self.rules {
            if !seen.insert(r.tag.as_str()) {
                return Err(config_err(format!("duplicate life event '{}'", r.tag)));
            }
            if !(0.0..=1.0).contains(&r.daily_rate) {
                return Err(config_err(format!("life event '{}': rate outside [0,1]", r.tag)));
            }
            if !r.condition.is_persona_only() {
                return Err(config_err(format!(
                    "life event '{}': condition must only read the persona",
                    r.tag
                )));
            }
        }
        if !self.rules.iter().any(|r| r.effect == LifeEffect::Birth)
            && self
                .rules
                .iter()
                .any(|r| matches!(r.effect, LifeEffect::Pregnancy { .. }))
        {
            return Err(config_err("a pregnancy event requires a birth event"));
        }
        Ok(())
    }

    pub fn get(&self, tag: &str) -> Option<&LifeEventRule> {
        self.rules.iter().find(|r| r.tag == tag)
    }

    /// Tag of the event that delivers a scheduled birth.
    pub fn birth_tag(&self) -> Option<&str> {
        self.rules
            .iter()
            .find(|r| r.effect == LifeEffect::Birth)
            .map(|r| r.tag.as_str())
    }
}

const WORK: &[&str] = &[
    "engineer",
    "teacher",
    "nurse",
    "sales",
    "designer",
    "civil servant",
    "accountant",
    "driver",
    "freelancer",
];

impl Default for LifeEventTable {
    fn default() -> Self {
        use Condition::*;
        let work: Vec<String> = WORK.iter().map(|s| String::from(*s)).collect();
        let rule = |tag: &str, effect, condition, daily_rate| LifeEventRule {
            tag: tag.into(),
            effect,
            condition,
            daily_rate,
        };
        Self {
            rules: alloc::vec![
                rule(
                    "pregnancy",
                    LifeEffect::Pregnancy { gestation_days: 280 },
                    All(alloc::vec![
                        LifeStageIn(alloc::vec![LifeStage::InRelationship, LifeStage::FamilyOriented]),
                        AgeBetween { min: 22, max: 40 },
                        Not(alloc::boxed::Box::new(Expecting)),
                        Not(alloc::boxed::Box::new(HasChildAgedMonths { min: 0, max: 18 })),
                    ]),
                    1.0 / 700.0,
                ),
                rule("birth", LifeEffect::Birth, Never, 0.0),
                rule("relocation", LifeEffect::Relocation, Always, 1.0 / 2500.0),
                rule(
                    "career-change",
                    LifeEffect::CareerChange { occupations: work.clone() },
                    Not(alloc::boxed::Box::new(LifeStageIn(alloc::vec![
                        LifeStage::Student,
                        LifeStage::Retired
                    ]))),
                    1.0 / 1500.0,
                ),
                rule(
                    "start-relationship",
                    LifeEffect::StartRelationship,
                    All(alloc::vec![
                        LifeStageIn(alloc::vec![LifeStage::Single]),
                        AgeBetween { min: 20, max: 45 },
                    ]),
                    1.0 / 800.0,
                ),
                rule(
                    "graduation",
                    LifeEffect::Graduation { occupations: work },
                    All(alloc::vec![
                        LifeStageIn(alloc::vec![LifeStage::Student]),
                        AgeBetween { min: 21, max: 30 },
                    ]),
                    1.0 / 400.0,
                ),
                rule(
                    "retirement",
                    LifeEffect::Retirement,
                    All(alloc::vec![
                        AgeBetween { min: 55, max: 80 },
                        LifeStageIn(alloc::vec![LifeStage::Single, LifeStage::InRelationship]),
                    ]),
                    1.0 / 1000.0,
                ),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Event { tag: String, date: Date },
    Periodic,
}

pub struct EvolveContext<'a> {
    pub table: &'a LifeEventTable,
    /// Largest change of one preference weight per periodic update.
    pub preference_cap: f64,
    pub catalog: &'a Catalog,
}

pub fn evolve_persona<R: Rng + ?Sized>(
    persona: &PersonaState,
    trigger: &Trigger,
    recent_events: &[BehaviorEvent],
    ctx: &EvolveContext<'_>,
    rng: &mut R,
) -> Result<PersonaState, SimError> {
    let mut p = persona.clone();
    match trigger {
        Trigger::Periodic => adjust_preferences(&mut p, recent_events, ctx),
        Trigger::Event { tag, date } => {
            let rule = ctx
                .table
                .get(tag)
                .ok_or_else(|| config_err(format!("unknown life event '{tag}'")))?;
            apply_effect(&mut p, &rule.effect, *date, rng);
        }
    }
    Ok(p)
}

fn pick_other<R: Rng + ?Sized>(options: &[String], current: &str, rng: &mut R) -> Option<String> {
    let pool: Vec<&String> = options.iter().filter(|o| *o != current).collect();
    pool.choose(rng).map(|s| (*s).clone())
}

fn apply_effect<R: Rng + ?Sized>(p: &mut PersonaState, effect: &LifeEffect, date: Date, rng: &mut R) {
    match effect {
        LifeEffect::Pregnancy { gestation_days } => {
            if p.pending_birth.is_none() {
                p.pending_birth = Some(add_days(date, *gestation_days));
                p.consumption_needs.insert("expecting".into());
            }
        }
        LifeEffect::Birth => {
            let gender = if rng.gen_bool(0.5) {
                Gender::Female
            } else {
                Gender::Male
            };
            p.household.children.push(Child {
                birth_date: date,
                gender,
            });
            p.life_stage = LifeStage::FamilyOriented;
            p.pending_birth = None;
            p.consumption_needs.remove("expecting");
        }
        LifeEffect::Relocation => {
            p.demographics.city_tier = *CityTier::ALL.choose(rng).unwrap();
            let others: Vec<Region> = Region::ALL
                .into_iter()
                .filter(|r| *r != p.demographics.region)
                .collect();
            p.demographics.region = *others.choose(rng).unwrap();
        }
        LifeEffect::CareerChange { occupations } => {
            if let Some(o) = pick_other(occupations, &p.occupation, rng) {
                p.occupation = o;
            }
        }
        LifeEffect::StartRelationship => {
            if p.life_stage == LifeStage::Single {
                p.life_stage = LifeStage::InRelationship;
            }
        }
        LifeEffect::Graduation { occupations } => {
            if p.life_stage == LifeStage::Student {
                p.life_stage = LifeStage::Single;
            }
            p.is_student = Tri::No;
            if let Some(o) = pick_other(occupations, &p.occupation, rng) {
                p.occupation = o;
            }
        }
        LifeEffect::Retirement => {
            // Parents keep the family stage; the household rule outranks retirement.
            if p.household.children.is_empty() {
                p.life_stage = LifeStage::Retired;
            }
            p.occupation = "retired".into();
            p.is_student = Tri::No;
        }
    }
}

/// Moves each weight halfway towards the category's share of recent clean
/// activity (relative to the busiest category), capped per update.
fn adjust_preferences(p: &mut PersonaState, recent: &[BehaviorEvent], ctx: &EvolveContext<'_>) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in recent.iter().filter(|e| e.noise_flag.is_clean()) {
        if let Some(item) = ctx.catalog.get(&e.entity.entity_id) {
            *counts.entry(item.category.as_str()).or_default() += 1;
        }
    }
    let Some(max) = counts.values().copied().max() else {
        return;
    };
    let cap = ctx.preference_cap.abs();
    let mut keys: BTreeSet<String> = p.dynamic_preferences.keys().cloned().collect();
    keys.extend(counts.keys().map(|k| String::from(*k)));
    for k in keys {
        let old = p.dynamic_preferences.get(&k).copied().unwrap_or(0.0);
        let target = counts.get(k.as_str()).copied().unwrap_or(0) as f64 / max as f64;
        let delta = (0.5 * (target - old)).clamp(-cap, cap);
        p.dynamic_preferences.insert(k, (old + delta).clamp(0.0, 1.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::parse_day;
    use crate::rng::seeded;
    use crate::sim::persona::{BigFive, Demographics, Household};
    use crate::sim::types::{ActionType, EntityRef, NoiseFlag, Platform};
    use alloc::vec;

    fn persona() -> PersonaState {
        PersonaState {
            user_id: "u3".into(),
            demographics: Demographics {
                birth_date: parse_day("1994-06-01").unwrap(),
                gender: Gender::Female,
                city_tier: CityTier::Tier3,
                region: Region::North,
            },
            traits: BigFive::neutral(),
            consumption_needs: BTreeSet::new(),
            life_stage: LifeStage::InRelationship,
            household: Household::default(),
            dynamic_preferences: [("apparel".into(), 0.5), ("groceries".into(), 0.2)].into(),
            occupation: "teacher".into(),
            is_student: Tri::No,
            pending_birth: None,
        }
    }

    fn ctx<'a>(table: &'a LifeEventTable, catalog: &'a Catalog) -> EvolveContext<'a> {
        EvolveContext {
            table,
            preference_cap: 0.1,
            catalog,
        }
    }

    #[test]
    fn periodic_without_events_is_identity() {
        let t = LifeEventTable::default();
        let c = Catalog::builtin(1, 2);
        let p = persona();
        let q = evolve_persona(&p, &Trigger::Periodic, &[], &ctx(&t, &c), &mut seeded(1)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn periodic_moves_only_preferences_within_cap() {
        let t = LifeEventTable::default();
        let c = Catalog::builtin(1, 2);
        let item = c.items.iter().find(|i| i.category == "electronics").unwrap();
        let ev = BehaviorEvent {
            timestamp: parse_day("2024-01-01").unwrap(),
            platform: Platform::ECommerce,
            action_type: ActionType::Click,
            entity: EntityRef {
                entity_id: item.entity_id.clone(),
                title: item.title.clone(),
            },
            noise_flag: NoiseFlag::Clean,
            actor_id: "u3".into(),
        };
        let p = persona();
        let q = evolve_persona(&p, &Trigger::Periodic, &vec![ev; 5], &ctx(&t, &c), &mut seeded(1))
            .unwrap();
        assert_eq!(q.demographics, p.demographics);
        assert_eq!(q.life_stage, p.life_stage);
        for (k, w) in &q.dynamic_preferences {
            let old = p.dynamic_preferences.get(k).copied().unwrap_or(0.0);
            assert!((w - old).abs() <= 0.1 + 1e-12);
        }
        assert!((q.dynamic_preferences["electronics"] - 0.1).abs() < 1e-12);
        assert!((q.dynamic_preferences["apparel"] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn relocation_keeps_age_and_gender() {
        let t = LifeEventTable::default();
        let c = Catalog::default();
        let p = persona();
        let trig = Trigger::Event {
            tag: "relocation".into(),
            date: parse_day("2024-05-05").unwrap(),
        };
        let q = evolve_persona(&p, &trig, &[], &ctx(&t, &c), &mut seeded(2)).unwrap();
        assert_ne!(q.demographics.region, p.demographics.region);
        assert_eq!(q.demographics.birth_date, p.demographics.birth_date);
        assert_eq!(q.demographics.gender, p.demographics.gender);
    }

    #[test]
    fn pregnancy_then_birth_after_gestation() {
        let t = LifeEventTable::default();
        let c = Catalog::default();
        let d = parse_day("2024-03-01").unwrap();
        let p = persona();
        assert_eq!(p.age_at(d), 29);
        let preg = Trigger::Event {
            tag: "pregnancy".into(),
            date: d,
        };
        let q = evolve_persona(&p, &preg, &[], &ctx(&t, &c), &mut seeded(3)).unwrap();
        let due = add_days(d, 280);
        assert_eq!(q.pending_birth, Some(due));
        assert!(q.household.children.is_empty());
        let birth = Trigger::Event {
            tag: "birth".into(),
            date: due,
        };
        let r = evolve_persona(&q, &birth, &[], &ctx(&t, &c), &mut seeded(3)).unwrap();
        assert_eq!(r.household.children.len(), 1);
        assert_eq!(r.household.children[0].birth_date, due);
        assert_eq!(r.household.children[0].age_months(due), 0);
        assert_eq!(r.life_stage, LifeStage::FamilyOriented);
        assert!(!r.is_expecting());
        assert!(r.violations(due, &Default::default()).is_empty());
    }

    #[test]
    fn unknown_tag_is_config_error() {
        let t = LifeEventTable::default();
        let c = Catalog::default();
        let trig = Trigger::Event {
            tag: "lottery".into(),
            date: parse_day("2024-05-05").unwrap(),
        };
        assert!(matches!(
            evolve_persona(&persona(), &trig, &[], &ctx(&t, &c), &mut seeded(2)),
            Err(SimError::Config(_))
        ));
        assert!(t.validate().is_ok());
    }
}
