//! Persona sampling from a stratified population table, and resampling a
//! pool to match a target stratum distribution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::env::EnvironmentState;
use super::error::{config_err, SimError};
use super::needs::Condition;
use super::persona::{
    BigFive, Child, CityTier, Demographics, Gender, Household, LifeStage, PersonaState, Region, Tri,
};
use crate::date::{add_days, years_before, Date};
use crate::rng::weighted_index;

/// One (age band × gender × life stage) stratum and its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub age_min: i32,
    pub age_max: i32,
    pub gender: Gender,
    pub life_stage: LifeStage,
    pub p: f64,
}

impl Stratum {
    pub fn contains(&self, p: &PersonaState, on: Date) -> bool {
        let age = p.age_at(on);
        self.age_min <= age
            && age <= self.age_max
            && p.demographics.gender == self.gender
            && p.life_stage == self.life_stage
    }

    pub fn label(&self) -> String {
        format!(
            "{}-{}/{}/{}",
            self.age_min,
            self.age_max,
            self.gender.name(),
            self.life_stage
        )
    }
}

/// One line of the population table file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "table", rename_all = "snake_case")]
pub enum PopulationRow {
    Stratum(Stratum),
    CityTier { tier: CityTier, p: f64 },
    Region { region: Region, p: f64 },
    /// P(number of children | life stage).
    Children { life_stage: LifeStage, count: u8, p: f64 },
    /// P(occupation | life stage).
    Occupation { life_stage: LifeStage, occupation: String, p: f64 },
    /// Independent need tag, drawn with probability `p` when `condition` holds.
    NeedTag { tag: String, condition: Condition, p: f64 },
    /// Initial dynamic preference drawn uniformly from `[min, max]`.
    Preference { category: String, min: f64, max: f64 },
    /// Date ages are measured at.
    Reference { date: Date },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationConfig {
    pub strata: Vec<Stratum>,
    pub city_tier: Vec<(CityTier, f64)>,
    pub region: Vec<(Region, f64)>,
    pub children: BTreeMap<LifeStage, Vec<(u8, f64)>>,
    pub occupation: BTreeMap<LifeStage, Vec<(String, f64)>>,
    pub need_tags: Vec<(String, Condition, f64)>,
    pub preferences: Vec<(String, f64, f64)>,
    pub reference: Date,
    pub min_parental_gap_years: u32,
}

fn check_sum(what: &str, ps: impl Iterator<Item = f64>) -> Result<(), SimError> {
    let mut sum = 0.0;
    for p in ps {
        if !p.is_finite() || p < 0.0 {
            return Err(config_err(format!("{what}: bad probability {p}")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(config_err(format!("{what}: probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

impl PopulationConfig {
    pub fn from_rows(rows: &[PopulationRow], min_parental_gap_years: u32) -> Result<Self, SimError> {
        let mut c = Self {
            strata: Vec::new(),
            city_tier: Vec::new(),
            region: Vec::new(),
            children: BTreeMap::new(),
            occupation: BTreeMap::new(),
            need_tags: Vec::new(),
            preferences: Vec::new(),
            reference: Date::from_ymd_opt(2022, 1, 1).unwrap(),
            min_parental_gap_years,
        };
        for r in rows {
            match r {
                PopulationRow::Stratum(s) => c.strata.push(s.clone()),
                PopulationRow::CityTier { tier, p } => c.city_tier.push((*tier, *p)),
                PopulationRow::Region { region, p } => c.region.push((*region, *p)),
                PopulationRow::Children { life_stage, count, p } => {
                    c.children.entry(*life_stage).or_default().push((*count, *p))
                }
                PopulationRow::Occupation {
                    life_stage,
                    occupation,
                    p,
                } => c
                    .occupation
                    .entry(*life_stage)
                    .or_default()
                    .push((occupation.clone(), *p)),
                PopulationRow::NeedTag { tag, condition, p } => {
                    c.need_tags.push((tag.clone(), condition.clone(), *p))
                }
                PopulationRow::Preference { category, min, max } => {
                    c.preferences.push((category.clone(), *min, *max))
                }
                PopulationRow::Reference { date } => c.reference = *date,
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_rows(&self) -> Vec<PopulationRow> {
        let mut out = alloc::vec![PopulationRow::Reference { date: self.reference }];
        out.extend(self.strata.iter().cloned().map(PopulationRow::Stratum));
        out.extend(
            self.city_tier
                .iter()
                .map(|(tier, p)| PopulationRow::CityTier { tier: *tier, p: *p }),
        );
        out.extend(
            self.region
                .iter()
                .map(|(region, p)| PopulationRow::Region { region: *region, p: *p }),
        );
        for (ls, rows) in &self.children {
            out.extend(rows.iter().map(|(count, p)| PopulationRow::Children {
                life_stage: *ls,
                count: *count,
                p: *p,
            }));
        }
        for (ls, rows) in &self.occupation {
            out.extend(rows.iter().map(|(o, p)| PopulationRow::Occupation {
                life_stage: *ls,
                occupation: o.clone(),
                p: *p,
            }));
        }
        out.extend(self.need_tags.iter().map(|(tag, condition, p)| PopulationRow::NeedTag {
            tag: tag.clone(),
            condition: condition.clone(),
            p: *p,
        }));
        out.extend(
            self.preferences
                .iter()
                .map(|(category, min, max)| PopulationRow::Preference {
                    category: category.clone(),
                    min: *min,
                    max: *max,
                }),
        );
        out
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.strata.is_empty() {
            return Err(config_err("population: no strata"));
        }
        check_sum("population strata", self.strata.iter().map(|s| s.p))?;
        for s in &self.strata {
            if s.age_min < 0 || s.age_max < s.age_min {
                return Err(config_err(format!("stratum {}: bad age band", s.label())));
            }
        }
        check_sum("city tier", self.city_tier.iter().map(|r| r.1))?;
        check_sum("region", self.region.iter().map(|r| r.1))?;
        for (ls, rows) in &self.children {
            check_sum(&format!("children | {ls}"), rows.iter().map(|r| r.1))?;
            if *ls != LifeStage::FamilyOriented && rows.iter().any(|(n, p)| *n > 0 && *p > 0.0) {
                return Err(config_err(format!("children | {ls}: only family-oriented personas have children")));
            }
        }
        for (ls, rows) in &self.occupation {
            check_sum(&format!("occupation | {ls}"), rows.iter().map(|r| r.1))?;
        }
        let stages: BTreeSet<LifeStage> = self.strata.iter().map(|s| s.life_stage).collect();
        for ls in stages {
            if !self.occupation.contains_key(&ls) {
                return Err(config_err(format!("occupation table has no rows for {ls}")));
            }
        }
        for (tag, cond, p) in &self.need_tags {
            if !(0.0..=1.0).contains(p) || !cond.is_persona_only() {
                return Err(config_err(format!("need tag '{tag}': bad row")));
            }
        }
        for (cat, lo, hi) in &self.preferences {
            if !(0.0 <= *lo && lo <= hi && *hi <= 1.0) {
                return Err(config_err(format!("preference '{cat}': bad range")));
            }
        }
        Ok(())
    }
}

fn pick<'a, T, R: Rng + ?Sized>(rows: &'a [(T, f64)], rng: &mut R) -> Option<&'a T> {
    let w: Vec<f64> = rows.iter().map(|r| r.1).collect();
    weighted_index(&w, rng).map(|i| &rows[i].0)
}

fn birth_for_age<R: Rng + ?Sized>(on: Date, age: i32, rng: &mut R) -> Date {
    // Anywhere in the year that makes the persona exactly `age` on `on`.
    let latest = years_before(on, age);
    let earliest = add_days(years_before(on, age + 1), 1);
    let span = (latest - earliest).num_days();
    add_days(earliest, rng.gen_range(0..=span))
}

pub fn sample_persona<R: Rng + ?Sized>(
    user_id: &str,
    cfg: &PopulationConfig,
    rng: &mut R,
) -> Result<PersonaState, SimError> {
    let weights: Vec<f64> = cfg.strata.iter().map(|s| s.p).collect();
    let s = &cfg.strata[weighted_index(&weights, rng).ok_or_else(|| config_err("population: zero mass"))?];
    let on = cfg.reference;
    let age = rng.gen_range(s.age_min..=s.age_max);
    let birth_date = birth_for_age(on, age, rng);
    let city_tier = *pick(&cfg.city_tier, rng).ok_or_else(|| config_err("city tier table empty"))?;
    let region = *pick(&cfg.region, rng).ok_or_else(|| config_err("region table empty"))?;
    let occupation = pick(&cfg.occupation[&s.life_stage], rng)
        .cloned()
        .unwrap_or_else(|| "unknown".to_string());

    let mut children = Vec::new();
    if let Some(rows) = cfg.children.get(&s.life_stage) {
        let n = pick(rows, rng).copied().unwrap_or(0);
        // Children are born after the parental gap and at most 18 years ago.
        let gap_end = years_before(birth_date, -(cfg.min_parental_gap_years as i32));
        let oldest = core::cmp::max(add_days(gap_end, 1), years_before(on, 18));
        if oldest <= on {
            let span = (on - oldest).num_days();
            for _ in 0..n {
                let b = add_days(oldest, rng.gen_range(0..=span));
                let gender = if rng.gen_bool(0.5) { Gender::Female } else { Gender::Male };
                children.push(Child { birth_date: b, gender });
            }
            children.sort_by_key(|c| c.birth_date);
        }
    }
    let traits = BigFive {
        openness: rng.gen(),
        conscientiousness: rng.gen(),
        extraversion: rng.gen(),
        agreeableness: rng.gen(),
        neuroticism: rng.gen(),
    };
    let mut persona = PersonaState {
        user_id: user_id.into(),
        demographics: Demographics {
            birth_date,
            gender: s.gender,
            city_tier,
            region,
        },
        traits,
        consumption_needs: BTreeSet::new(),
        life_stage: s.life_stage,
        household: Household { children },
        dynamic_preferences: BTreeMap::new(),
        occupation,
        is_student: if s.life_stage == LifeStage::Student {
            Tri::Yes
        } else {
            Tri::No
        },
        pending_birth: None,
    };
    let env = EnvironmentState {
        date: on,
        events: BTreeSet::new(),
        pois: Vec::new(),
    };
    for (tag, cond, p) in &cfg.need_tags {
        let draw = rng.gen_bool(*p);
        if draw && cond.holds(&persona, &env) {
            persona.consumption_needs.insert(tag.clone());
        }
    }
    for (cat, lo, hi) in &cfg.preferences {
        let w = if hi > lo { rng.gen_range(*lo..=*hi) } else { *lo };
        persona.dynamic_preferences.insert(cat.clone(), w);
    }
    Ok(persona)
}

/// Resamples `personas` to `size` personas whose stratum frequencies follow
/// `target` (largest-remainder rounding). Duplicated personas get a
/// `-<copy>` suffix on their id.
pub fn align_population<R: Rng + ?Sized>(
    personas: &[PersonaState],
    target: &[Stratum],
    on: Date,
    size: usize,
    rng: &mut R,
) -> Result<Vec<PersonaState>, SimError> {
    check_sum("target distribution", target.iter().map(|s| s.p))?;
    let mut members: Vec<Vec<usize>> = alloc::vec![Vec::new(); target.len()];
    for (i, p) in personas.iter().enumerate() {
        let s = target
            .iter()
            .position(|s| s.contains(p, on))
            .ok_or_else(|| config_err(format!("persona '{}' falls in no target stratum", p.user_id)))?;
        members[s].push(i);
    }
    let missing: Vec<String> = target
        .iter()
        .zip(&members)
        .filter(|(s, m)| s.p > 0.0 && m.is_empty())
        .map(|(s, _)| s.label())
        .collect();
    if !missing.is_empty() {
        return Err(SimError::Alignment(missing));
    }
    let quotas = largest_remainder(&target.iter().map(|s| s.p).collect::<Vec<_>>(), size);
    let mut out = Vec::with_capacity(size);
    let mut copies: BTreeMap<usize, usize> = BTreeMap::new();
    for (s, q) in quotas.into_iter().enumerate() {
        for _ in 0..q {
            let i = *members[s].choose(rng).expect("non-empty stratum");
            let k = copies.entry(i).or_default();
            let mut p = personas[i].clone();
            if *k > 0 {
                p.user_id = format!("{}-{}", p.user_id, k);
            }
            *k += 1;
            out.push(p);
        }
    }
    out.shuffle(rng);
    Ok(out)
}

/// Integer counts summing to `n`, proportional to `p`.
pub fn largest_remainder(p: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = p.iter().sum();
    let exact: Vec<f64> = p.iter().map(|x| x / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| libm::floor(*x) as usize).collect();
    let mut left = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|a, b| {
        let ra = exact[*a] - counts[*a] as f64;
        let rb = exact[*b] - counts[*b] as f64;
        rb.total_cmp(&ra).then(a.cmp(b))
    });
    for i in order {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Shipped defaults: a coarse adult population with five life stages.
pub fn default_population_rows() -> Vec<PopulationRow> {
    use Gender::*;
    use LifeStage::*;
    let mut rows = alloc::vec![PopulationRow::Reference {
        date: Date::from_ymd_opt(2022, 1, 1).unwrap()
    }];
    let strata: &[(i32, i32, LifeStage, f64, f64)] = &[
        (18, 22, Student, 0.05, 0.05),
        (23, 30, Single, 0.06, 0.07),
        (23, 30, InRelationship, 0.05, 0.05),
        (23, 30, FamilyOriented, 0.04, 0.03),
        (31, 40, Single, 0.03, 0.04),
        (31, 40, InRelationship, 0.03, 0.03),
        (31, 40, FamilyOriented, 0.09, 0.08),
        (41, 55, Single, 0.02, 0.02),
        (41, 55, InRelationship, 0.02, 0.02),
        (41, 55, FamilyOriented, 0.05, 0.05),
        (56, 70, Retired, 0.04, 0.04),
        (56, 70, FamilyOriented, 0.02, 0.02),
    ];
    for (lo, hi, ls, pf, pm) in strata {
        for (g, p) in [(Female, pf), (Male, pm)] {
            rows.push(PopulationRow::Stratum(Stratum {
                age_min: *lo,
                age_max: *hi,
                gender: g,
                life_stage: *ls,
                p: *p,
            }));
        }
    }
    for (tier, p) in [
        (CityTier::Tier1, 0.2),
        (CityTier::Tier2, 0.3),
        (CityTier::Tier3, 0.3),
        (CityTier::Tier4, 0.2),
    ] {
        rows.push(PopulationRow::CityTier { tier, p });
    }
    let rp = [0.12, 0.08, 0.27, 0.18, 0.17, 0.12, 0.06];
    for (region, p) in Region::ALL.into_iter().zip(rp) {
        rows.push(PopulationRow::Region { region, p });
    }
    for ls in LifeStage::ALL {
        let dist: &[(u8, f64)] = if ls == FamilyOriented {
            &[(1, 0.55), (2, 0.35), (3, 0.10)]
        } else {
            &[(0, 1.0)]
        };
        for (count, p) in dist {
            rows.push(PopulationRow::Children {
                life_stage: ls,
                count: *count,
                p: *p,
            });
        }
        let jobs: &[&str] = match ls {
            Student => &["student"],
            Retired => &["retired"],
            _ => &[
                "engineer",
                "teacher",
                "nurse",
                "sales",
                "designer",
                "civil servant",
                "accountant",
                "driver",
            ],
        };
        for j in jobs {
            rows.push(PopulationRow::Occupation {
                life_stage: ls,
                occupation: (*j).into(),
                p: 1.0 / jobs.len() as f64,
            });
        }
    }
    let not_student = Condition::Not(alloc::boxed::Box::new(Condition::Student));
    for (tag, condition, p) in [
        ("fitness", Condition::AgeBetween { min: 16, max: 60 }, 0.35),
        ("reading", Condition::Always, 0.25),
        ("travel", not_student, 0.3),
        ("pet-owner", Condition::Always, 0.2),
        ("coffee", Condition::AgeBetween { min: 18, max: 50 }, 0.35),
        ("beauty", Condition::Gender(Female), 0.6),
    ] {
        rows.push(PopulationRow::NeedTag {
            tag: tag.into(),
            condition,
            p,
        });
    }
    for cat in [
        "apparel",
        "beauty",
        "electronics",
        "groceries",
        "home",
        "books-study",
        "outdoor-sports",
        "drinks",
        "food-delivery",
    ] {
        rows.push(PopulationRow::Preference {
            category: cat.into(),
            min: 0.1,
            max: 0.6,
        });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::sim::persona::PersonaRules;

    fn default_cfg() -> PopulationConfig {
        PopulationConfig::from_rows(&default_population_rows(), 16).unwrap()
    }

    #[test]
    fn single_stratum_is_reproduced_exactly() {
        let mut rows: Vec<PopulationRow> = default_population_rows()
            .into_iter()
            .filter(|r| !matches!(r, PopulationRow::Stratum(_)))
            .collect();
        rows.push(PopulationRow::Stratum(Stratum {
            age_min: 25,
            age_max: 25,
            gender: Gender::Female,
            life_stage: LifeStage::Single,
            p: 1.0,
        }));
        let cfg = PopulationConfig::from_rows(&rows, 16).unwrap();
        let mut rng = seeded(42);
        for _ in 0..50 {
            let p = sample_persona("u", &cfg, &mut rng).unwrap();
            assert_eq!(p.age_at(cfg.reference), 25);
            assert_eq!(p.demographics.gender, Gender::Female);
            assert_eq!(p.life_stage, LifeStage::Single);
            assert!(p.household.children.is_empty());
        }
    }

    #[test]
    fn same_seed_same_persona() {
        let cfg = default_cfg();
        let a = sample_persona("u1", &cfg, &mut seeded(42)).unwrap();
        let b = sample_persona("u1", &cfg, &mut seeded(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samples_satisfy_invariants() {
        let cfg = default_cfg();
        let mut rng = seeded(7);
        for i in 0..2000 {
            let p = sample_persona(&format!("u{i}"), &cfg, &mut rng).unwrap();
            let v = p.violations(cfg.reference, &PersonaRules::default());
            assert!(v.is_empty(), "{v:?} {p:?}");
        }
    }

    #[test]
    fn gender_frequency_follows_table() {
        let cfg = default_cfg();
        let want: f64 = cfg
            .strata
            .iter()
            .filter(|s| s.gender == Gender::Female)
            .map(|s| s.p)
            .sum();
        let mut rng = seeded(11);
        let n = 10_000;
        let f = (0..n)
            .filter(|_| {
                sample_persona("u", &cfg, &mut rng).unwrap().demographics.gender == Gender::Female
            })
            .count() as f64
            / n as f64;
        assert!((f - want).abs() < 0.02, "{f} vs {want}");
    }

    #[test]
    fn unnormalized_rows_rejected() {
        let mut rows = default_population_rows();
        rows.push(PopulationRow::CityTier {
            tier: CityTier::Tier1,
            p: 0.5,
        });
        assert!(matches!(
            PopulationConfig::from_rows(&rows, 16),
            Err(SimError::Config(_))
        ));
    }

    #[test]
    fn largest_remainder_sums() {
        assert_eq!(largest_remainder(&[0.5, 0.25, 0.25], 10), alloc::vec![5, 3, 2]);
        assert_eq!(largest_remainder(&[1.0], 7), alloc::vec![7]);
    }
}
