//! The Core Persona: demographics, traits, needs, life stage and household.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::date::{full_months, full_years, Date};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    pub fn name(self) -> &'static str {
        match self {
            Self::Female => "female",
            Self::Male => "male",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CityTier {
    #[serde(rename = "tier-1")]
    Tier1,
    #[serde(rename = "tier-2")]
    Tier2,
    #[serde(rename = "tier-3")]
    Tier3,
    #[serde(rename = "tier-4")]
    Tier4,
}

impl CityTier {
    pub const ALL: [CityTier; 4] = [Self::Tier1, Self::Tier2, Self::Tier3, Self::Tier4];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tier1 => "tier-1",
            Self::Tier2 => "tier-2",
            Self::Tier3 => "tier-3",
            Self::Tier4 => "tier-4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    North,
    Northeast,
    East,
    South,
    Central,
    Southwest,
    Northwest,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Self::North,
        Self::Northeast,
        Self::East,
        Self::South,
        Self::Central,
        Self::Southwest,
        Self::Northwest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::North => "north",
            Self::Northeast => "northeast",
            Self::East => "east",
            Self::South => "south",
            Self::Central => "central",
            Self::Southwest => "southwest",
            Self::Northwest => "northwest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LifeStage {
    Student,
    Single,
    InRelationship,
    FamilyOriented,
    Retired,
}

impl LifeStage {
    pub const ALL: [LifeStage; 5] = [
        Self::Student,
        Self::Single,
        Self::InRelationship,
        Self::FamilyOriented,
        Self::Retired,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Student => "student",
            Self::Single => "single",
            Self::InRelationship => "in-relationship",
            Self::FamilyOriented => "family-oriented",
            Self::Retired => "retired",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl fmt::Display for LifeStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Yes / no / unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tri {
    Yes,
    No,
    Na,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    pub birth_date: Date,
    pub gender: Gender,
    pub city_tier: CityTier,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigFive {
    pub openness: f64,
    pub conscientiousness: f64,
    pub extraversion: f64,
    pub agreeableness: f64,
    pub neuroticism: f64,
}

impl BigFive {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.openness,
            self.conscientiousness,
            self.extraversion,
            self.agreeableness,
            self.neuroticism,
        ]
    }

    pub fn neutral() -> Self {
        Self {
            openness: 0.5,
            conscientiousness: 0.5,
            extraversion: 0.5,
            agreeableness: 0.5,
            neuroticism: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Child {
    pub birth_date: Date,
    pub gender: Gender,
}

impl Child {
    pub fn age_months(&self, on: Date) -> i32 {
        full_months(self.birth_date, on)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Household {
    pub children: Vec<Child>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaState {
    pub user_id: String,
    pub demographics: Demographics,
    pub traits: BigFive,
    pub consumption_needs: BTreeSet<String>,
    pub life_stage: LifeStage,
    pub household: Household,
    pub dynamic_preferences: BTreeMap<String, f64>,
    pub occupation: String,
    pub is_student: Tri,
    /// Due date of an ongoing pregnancy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending_birth: Option<Date>,
}

impl PersonaState {
    pub fn age_at(&self, on: Date) -> i32 {
        full_years(self.demographics.birth_date, on)
    }

    pub fn is_expecting(&self) -> bool {
        self.pending_birth.is_some()
    }

    /// Ages in months of children already born on `on`.
    pub fn child_ages_months(&self, on: Date) -> impl Iterator<Item = i32> + '_ {
        self.household
            .children
            .iter()
            .map(move |c| c.age_months(on))
            .filter(|m| *m >= 0)
    }

    pub fn has_child_aged_months(&self, on: Date, min: i32, max: i32) -> bool {
        self.child_ages_months(on).any(|m| m >= min && m < max)
    }

    pub fn violations(&self, on: Date, rules: &PersonaRules) -> Vec<PersonaViolation> {
        let mut out = Vec::new();
        let age = self.age_at(on);
        if age < 0 {
            out.push(PersonaViolation::NegativeAge);
        }
        let t = self.traits.as_array();
        if t.iter().any(|x| !(0.0..=1.0).contains(x)) {
            out.push(PersonaViolation::TraitOutOfRange);
        }
        if self
            .dynamic_preferences
            .values()
            .any(|w| !(0.0..=1.0).contains(w))
        {
            out.push(PersonaViolation::PreferenceOutOfRange);
        }
        if !self.household.children.is_empty() && self.life_stage != LifeStage::FamilyOriented {
            out.push(PersonaViolation::ChildrenOutsideFamilyStage);
        }
        let earliest_child_birth = crate::date::years_before(
            self.demographics.birth_date,
            -(rules.min_parental_gap_years as i32),
        );
        if self
            .household
            .children
            .iter()
            .any(|c| c.birth_date < earliest_child_birth)
        {
            out.push(PersonaViolation::ParentalGap);
        }
        if self.life_stage == LifeStage::Student && self.is_student != Tri::Yes {
            out.push(PersonaViolation::StudentFlag);
        }
        if self.life_stage == LifeStage::Retired && age < rules.retired_min_age {
            out.push(PersonaViolation::RetiredTooYoung);
        }
        out
    }
}

/// Persona consistency rule table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaRules {
    pub min_parental_gap_years: u32,
    pub retired_min_age: i32,
}

impl Default for PersonaRules {
    fn default() -> Self {
        Self {
            min_parental_gap_years: 16,
            retired_min_age: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PersonaViolation {
    NegativeAge,
    TraitOutOfRange,
    PreferenceOutOfRange,
    ChildrenOutsideFamilyStage,
    ParentalGap,
    StudentFlag,
    RetiredTooYoung,
}
