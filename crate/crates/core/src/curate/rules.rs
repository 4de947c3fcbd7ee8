//! Legacy heuristic labels: keyword and platform rules over MUB records,
//! plus the cross-attribute conflict checker.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::error::CurateError;
use super::schema::{AtomicProfile, Schema, Value, ValueSpace};
use crate::semantize::MubRecord;
use crate::sim::types::Platform;
use crate::text::words;
use crate::vocab;

/// A predicate over a user's MUB records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// At least `min` items contain one of the phrases as a run of words.
    Mentions { any: Vec<String>, min: u32 },
    /// At least `min` records on the platform.
    Platform { platform: Platform, min: u32 },
    All { of: Vec<Evidence> },
    Any { of: Vec<Evidence> },
    Not { of: Box<Evidence> },
}

fn contains_run(hay: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}

impl Evidence {
    pub fn mentions(any: &[&str], min: u32) -> Self {
        Self::Mentions {
            any: any.iter().map(|s| s.to_string()).collect(),
            min,
        }
    }

    pub fn holds(&self, records: &[MubRecord]) -> bool {
        match self {
            Self::Mentions { any, min } => {
                let phrases: Vec<Vec<String>> = any.iter().map(|p| words(p)).collect();
                let n = records
                    .iter()
                    .flat_map(|r| r.items.iter())
                    .filter(|item| {
                        let w = words(item);
                        phrases.iter().any(|p| contains_run(&w, p))
                    })
                    .count();
                n >= *min as usize
            }
            Self::Platform { platform, min } => {
                records.iter().filter(|r| r.platform == *platform).count() >= *min as usize
            }
            Self::All { of } => of.iter().all(|e| e.holds(records)),
            Self::Any { of } => of.iter().any(|e| e.holds(records)),
            Self::Not { of } => !of.holds(records),
        }
    }
}

/// When `when` holds, `attribute` gets `value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRule {
    pub attribute: String,
    pub value: String,
    pub when: Evidence,
    /// Higher wins among firing rules for a categorical attribute.
    #[serde(default)]
    pub priority: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<LabelRule>,
}

/// Open-text attributes keep at most this many values from firing rules.
pub const MAX_OPEN_VALUES: usize = 5;

impl RuleSet {
    /// Every rule names a schema attribute and a declared value, and every
    /// attribute has at least one rule.
    pub fn validate(&self, schema: &Schema) -> Result<(), CurateError> {
        for r in &self.rules {
            let spec = schema
                .get(&r.attribute)
                .ok_or_else(|| CurateError::Rules(alloc::format!("unknown attribute {:?}", r.attribute)))?;
            if r.value != Value::NA_TEXT && spec.canonical_value(&r.value).as_deref() != Some(r.value.as_str()) {
                return Err(CurateError::Rules(alloc::format!("{}: undeclared value {:?}", r.attribute, r.value)));
            }
        }
        if let Some(id) = schema.ids().find(|id| !self.rules.iter().any(|r| r.attribute == *id)) {
            return Err(CurateError::Rules(alloc::format!("no rule covers {id:?}")));
        }
        Ok(())
    }
}

/// RULE(U). Categorical attributes take the value of the highest-priority
/// firing rule (earlier rules win ties); open-text attributes list the
/// distinct values of all firing rules by priority. No firing rule, or no
/// records at all, means NA.
pub fn rule_label(records: &[MubRecord], rules: &RuleSet, schema: &Schema) -> AtomicProfile {
    let mut p = AtomicProfile::all_na(schema);
    if records.iter().all(|r| r.items.is_empty()) {
        return p;
    }
    for spec in &schema.attributes {
        let mut fired: Vec<&LabelRule> = rules
            .rules
            .iter()
            .filter(|r| r.attribute == spec.id && r.when.holds(records))
            .collect();
        fired.sort_by_key(|r| core::cmp::Reverse(r.priority));
        let value = match spec.space {
            ValueSpace::Categorical(_) => fired.first().map(|r| r.value.clone()),
            ValueSpace::OpenText => {
                let mut vals: Vec<&str> = Vec::new();
                for r in &fired {
                    if !vals.contains(&r.value.as_str()) && vals.len() < MAX_OPEN_VALUES {
                        vals.push(&r.value);
                    }
                }
                (!vals.is_empty()).then(|| vals.join(", "))
            }
        };
        if let Some(v) = value.filter(|v| v != Value::NA_TEXT) {
            p.set(&spec.id, Value::Known(v));
        }
    }
    p
}

const BABY: &[&str] = &[
    "diapers", "wet wipes", "baby wipes", "formula", "baby bottle", "picture book", "building blocks",
    "spouse", "husband", "wife", "my kids", "children",
];
const MINOR: &[&str] = &["junior high", "middle school", "high school student", "minor", "boyfriend", "girlfriend"];
const STUDY: &[&str] = &["exam prep book", "postgraduate"];
const ELDER: &[&str] = &["blood pressure monitor"];

fn rule(attribute: &str, value: &str, priority: i32, when: Evidence) -> LabelRule {
    LabelRule {
        attribute: attribute.into(),
        value: value.into(),
        when,
        priority,
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        use Evidence as E;
        let mut rules = alloc::vec![
            rule("marital_status", "Unmarried", 30, E::mentions(MINOR, 1)),
            rule("marital_status", "Married", 20, E::mentions(BABY, 2)),
            rule("life_stage", "Family-oriented", 20, E::mentions(BABY, 2)),
            rule("life_stage", "Student", 10, E::mentions(STUDY, 1)),
            rule("life_stage", "Retired", 5, E::mentions(ELDER, 2)),
            rule("age_group", "Under 18", 30, E::mentions(MINOR, 1)),
            rule("age_group", "18-24", 10, E::mentions(STUDY, 1)),
            rule("age_group", "60+", 10, E::mentions(ELDER, 2)),
            rule("gender", "Male", 12, E::mentions(&["men's"], 2)),
            rule("gender", "Female", 10, E::mentions(&["women's", "lipstick", "dress", "face cream"], 2)),
            rule("has_children", "Yes", 20, E::mentions(BABY, 2)),
            rule("child_count", "1", 10, E::mentions(BABY, 2)),
            rule("youngest_child_stage", "Infant", 30, E::mentions(&["stage 1 formula", "stage 2 formula", "diapers"], 1)),
            rule("youngest_child_stage", "Toddler", 20, E::mentions(&["stage 3 formula"], 1)),
            rule("youngest_child_stage", "Preschool", 10, E::mentions(&["picture book", "building blocks"], 1)),
            rule("youngest_child_gender", "Girl", 10, E::mentions(&["baby girl", "girls"], 1)),
            rule("youngest_child_gender", "Boy", 10, E::mentions(&["baby boy", "boys"], 1)),
            rule("expecting", "Yes", 10, E::mentions(&["prenatal vitamins", "pregnancy pillow", "maternity"], 1)),
            rule("consumption_tier", "Premium", 20, E::mentions(&["resort", "luxury suite", "cashmere"], 2)),
            rule("consumption_tier", "Budget", 10, E::mentions(&["budget hotel"], 1)),
            rule("consumption_tier", "Quality-conscious", 5, E::mentions(&["organic", "a2-protein"], 1)),
            rule("hobbies", "fitness", 30, E::mentions(&["yoga mat", "fitness club", "running shoes"], 2)),
            rule("hobbies", "travel", 20, E::Platform { platform: Platform::Ota, min: 2 }),
            rule("hobbies", "outdoor", 15, E::mentions(&["hiking backpack", "camping tent"], 1)),
            rule("hobbies", "reading", 10, E::mentions(&["novel", "museum"], 2)),
            rule("hobbies", "coffee", 5, E::mentions(&["latte", "coffee beans"], 2)),
            rule("pet_owner", "Yes", 10, E::mentions(&["cat food", "dog leash"], 1)),
            rule("is_student", "Yes", 10, E::mentions(STUDY, 1)),
            rule("occupation", "student", 10, E::mentions(STUDY, 1)),
            rule("occupation", "retired", 5, E::mentions(ELDER, 2)),
            rule("education", "Postgraduate", 10, E::mentions(&["postgraduate"], 1)),
            rule("education", "Bachelor's", 5, E::mentions(&["civil-service"], 1)),
            rule("city_tier", "Tier 1", 10, E::Platform { platform: Platform::Delivery, min: 30 }),
        ];
        for b in vocab::BRANDS {
            rules.push(rule("brand_preference", b, 0, E::mentions(&[b], 3)));
        }
        for r in crate::sim::persona::Region::ALL {
            let name = title_case(r.name());
            rules.push(rule("region", &name, 10, E::mentions(&[&alloc::format!("district {name}")], 2)));
        }
        Self { rules }
    }
}

fn title_case(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// A logically impossible combination of labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub rule: &'static str,
    pub attributes: Vec<&'static str>,
}

fn age_rank(v: &Value) -> Option<usize> {
    const ORDER: [&str; 10] = ["Under 18", "18-24", "25-29", "30-34", "35-39", "40-44", "45-49", "50-54", "55-59", "60+"];
    match v {
        Value::Known(s) => ORDER.iter().position(|o| o == s),
        Value::Na => None,
    }
}

/// Cross-attribute consistency checks. NA never conflicts.
pub fn check_conflicts(p: &AtomicProfile) -> Vec<Conflict> {
    let is = |id: &str, v: &str| p.get(id).as_str() == v && !p.get(id).is_na();
    let known = |id: &str| !p.get(id).is_na();
    let age = age_rank(p.get("age_group"));
    let mut out = Vec::new();
    let mut flag = |cond: bool, rule: &'static str, attributes: &[&'static str]| {
        if cond {
            out.push(Conflict {
                rule,
                attributes: attributes.to_vec(),
            });
        }
    };
    flag(
        is("marital_status", "Unmarried") && is("has_children", "Yes"),
        "unmarried-with-children",
        &["marital_status", "has_children"],
    );
    flag(
        (is("has_children", "No") && known("child_count") && !is("child_count", "0"))
            || (is("has_children", "Yes") && is("child_count", "0")),
        "child-count-mismatch",
        &["has_children", "child_count"],
    );
    flag(
        is("has_children", "No") && (known("youngest_child_stage") || known("youngest_child_gender")),
        "child-details-without-children",
        &["has_children", "youngest_child_stage", "youngest_child_gender"],
    );
    flag(
        is("is_student", "Yes") && age.is_some_and(|a| a >= 4),
        "mature-student",
        &["is_student", "age_group"],
    );
    flag(
        is("life_stage", "Retired") && age.is_some_and(|a| a < 7),
        "young-retiree",
        &["life_stage", "age_group"],
    );
    flag(
        age == Some(0) && (is("marital_status", "Married") || is("has_children", "Yes")),
        "minor-with-family",
        &["age_group", "marital_status", "has_children"],
    );
    flag(
        is("life_stage", "Student") && is("is_student", "No"),
        "student-stage-flag",
        &["life_stage", "is_student"],
    );
    flag(
        is("life_stage", "Family-oriented") && is("marital_status", "Unmarried") && is("has_children", "No"),
        "family-without-family",
        &["life_stage", "marital_status", "has_children"],
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantize::parse_mub;

    fn mub(text: &str) -> Vec<MubRecord> {
        parse_mub(text).unwrap()
    }

    #[test]
    fn default_rules_cover_schema() {
        RuleSet::default().validate(&Schema::builtin()).unwrap();
        let mut partial = RuleSet::default();
        partial.rules.retain(|r| r.attribute != "region");
        assert!(partial.validate(&Schema::builtin()).is_err());
    }

    #[test]
    fn children_evidence_means_married() {
        let s = Schema::builtin();
        let recs = mub("[E-commerce] [2025-03] [Purchase] [3] | Pampers diapers, Feihe stage-1 formula\n");
        let p = rule_label(&recs, &RuleSet::default(), &s);
        assert_eq!(p.get("marital_status"), &Value::known("Married"));
        assert_eq!(p.get("has_children"), &Value::known("Yes"));
        assert_eq!(p.get("youngest_child_stage"), &Value::known("Infant"));
        assert!(p.get("region").is_na());
        assert!(check_conflicts(&p).is_empty());
    }

    #[test]
    fn minor_evidence_means_unmarried() {
        let s = Schema::builtin();
        let recs = mub("[E-commerce] [2025-03-02] [Click] | junior high maths workbook\n");
        let p = rule_label(&recs, &RuleSet::default(), &s);
        assert_eq!(p.get("marital_status"), &Value::known("Unmarried"));
        assert_eq!(p.get("age_group"), &Value::known("Under 18"));
    }

    #[test]
    fn empty_mub_is_all_na() {
        let s = Schema::builtin();
        assert_eq!(rule_label(&[], &RuleSet::default(), &s), AtomicProfile::all_na(&s));
    }

    #[test]
    fn region_phrase_is_word_exact() {
        let s = Schema::builtin();
        let recs = mub("[POI] [2025-03-02] [Visit] [2] | Maple District Southwest Harbor Park, Maple District Southwest Sunshine Mall\n");
        let p = rule_label(&recs, &RuleSet::default(), &s);
        assert_eq!(p.get("region"), &Value::known("Southwest"));
    }

    #[test]
    fn conflicts_detected() {
        let p = AtomicProfile::default()
            .with("marital_status", "Unmarried")
            .with("has_children", "Yes");
        assert_eq!(check_conflicts(&p)[0].rule, "unmarried-with-children");
        let p = AtomicProfile::default().with("is_student", "Yes").with("age_group", "40-44");
        assert_eq!(check_conflicts(&p)[0].rule, "mature-student");
        assert!(check_conflicts(&AtomicProfile::default()).is_empty());
    }

    #[test]
    fn open_text_collects_values() {
        let s = Schema::builtin();
        let recs = mub(
            "[E-commerce] [2025-03-02] [Purchase] [4] | Decathlon yoga mat, Anta running shoes, Decathlon camping tent, Decathlon hiking backpack\n",
        );
        let p = rule_label(&recs, &RuleSet::default(), &s);
        assert_eq!(p.get("hobbies"), &Value::known("fitness, outdoor"));
        assert_eq!(p.get("brand_preference"), &Value::known("Decathlon"));
    }
}
