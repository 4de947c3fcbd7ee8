//! The atomic attribute schema and profile values.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::error::CurateError;
use crate::metrics::{Similarity, TokenCosine, DEFAULT_TAU};

/// The five reporting dimensions the attributes group into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    /// Life stage.
    LS,
    /// Household context.
    HC,
    /// Lifestyle indicators.
    LI,
    /// Educational and professional background.
    EP,
    /// Geographic context.
    GC,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [Self::LS, Self::HC, Self::LI, Self::EP, Self::GC];

    pub fn code(self) -> &'static str {
        match self {
            Self::LS => "LS",
            Self::HC => "HC",
            Self::LI => "LI",
            Self::EP => "EP",
            Self::GC => "GC",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::LS => "Life Stage",
            Self::HC => "Household Context",
            Self::LI => "Lifestyle Indicators",
            Self::EP => "Educational & Professional Background",
            Self::GC => "Geographic Context",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "kebab-case")]
pub enum ValueSpace {
    /// A closed set of values plus NA.
    Categorical(Vec<String>),
    OpenText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub id: String,
    /// Human-readable name, used in summaries.
    pub label: String,
    pub dimension: Dimension,
    pub space: ValueSpace,
}

impl AttributeSpec {
    /// The declared spelling of a categorical value, matched case-insensitively.
    pub fn canonical_value(&self, raw: &str) -> Option<String> {
        let raw = raw.trim();
        match &self.space {
            ValueSpace::OpenText => (!raw.is_empty()).then(|| raw.to_string()),
            ValueSpace::Categorical(vals) => vals
                .iter()
                .find(|v| v.eq_ignore_ascii_case(raw))
                .cloned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub attributes: Vec<AttributeSpec>,
}

fn cat(id: &str, label: &str, dimension: Dimension, values: &[&str]) -> AttributeSpec {
    AttributeSpec {
        id: id.into(),
        label: label.into(),
        dimension,
        space: ValueSpace::Categorical(values.iter().map(|s| s.to_string()).collect()),
    }
}

fn open(id: &str, label: &str, dimension: Dimension) -> AttributeSpec {
    AttributeSpec {
        id: id.into(),
        label: label.into(),
        dimension,
        space: ValueSpace::OpenText,
    }
}

impl Schema {
    /// The 18 atomic tags.
    pub fn builtin() -> Self {
        use Dimension::*;
        let yes_no = &["Yes", "No"];
        Self {
            attributes: alloc::vec![
                cat("life_stage", "Life stage", LS, &["Student", "Single", "In a relationship", "Family-oriented", "Retired"]),
                cat("marital_status", "Marital status", LS, &["Married", "Unmarried"]),
                cat("age_group", "Age group", LS, &["Under 18", "18-24", "25-29", "30-34", "35-39", "40-44", "45-49", "50-54", "55-59", "60+"]),
                cat("gender", "Gender", LS, &["Female", "Male"]),
                cat("has_children", "Has children", HC, yes_no),
                cat("child_count", "Number of children", HC, &["0", "1", "2", "3+"]),
                cat("youngest_child_stage", "Youngest child stage", HC, &["Infant", "Toddler", "Preschool", "Primary School", "Secondary School", "Adult"]),
                cat("youngest_child_gender", "Youngest child gender", HC, &["Girl", "Boy"]),
                cat("expecting", "Expecting a baby", HC, yes_no),
                cat("consumption_tier", "Consumption tier", LI, &["Budget", "Mass-market", "Quality-conscious", "Premium"]),
                open("hobbies", "Hobbies", LI),
                open("brand_preference", "Brand preference", LI),
                cat("pet_owner", "Keeps pets", LI, yes_no),
                cat("is_student", "Is currently a student", EP, yes_no),
                open("occupation", "Occupation", EP),
                cat("education", "Education", EP, &["High school or below", "Bachelor's", "Postgraduate"]),
                cat("city_tier", "City tier", GC, &["Tier 1", "Tier 2", "Tier 3", "Tier 4"]),
                cat("region", "Region", GC, &["North", "Northeast", "East", "South", "Central", "Southwest", "Northwest"]),
            ],
        }
    }

    pub fn k(&self) -> usize {
        self.attributes.len()
    }

    pub fn get(&self, id: &str) -> Option<&AttributeSpec> {
        self.attributes.iter().find(|a| a.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.id.as_str())
    }

    pub fn validate(&self) -> Result<(), CurateError> {
        if self.attributes.is_empty() {
            return Err(CurateError::Schema("no attributes".into()));
        }
        for (i, a) in self.attributes.iter().enumerate() {
            if a.id.trim().is_empty() || self.attributes[..i].iter().any(|b| b.id == a.id) {
                return Err(CurateError::Schema(alloc::format!("bad or duplicate id {:?}", a.id)));
            }
            if let ValueSpace::Categorical(v) = &a.space {
                if v.is_empty() || v.iter().any(|x| x.eq_ignore_ascii_case(Value::NA_TEXT)) {
                    return Err(CurateError::Schema(alloc::format!("{}: bad value space", a.id)));
                }
            }
        }
        Ok(())
    }
}

impl Default for Schema {
    fn default() -> Self {
        Self::builtin()
    }
}

/// An attribute value; NA means unknown.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Value {
    #[default]
    Na,
    Known(String),
}

impl Value {
    pub const NA_TEXT: &'static str = "NA";

    pub fn known(s: impl Into<String>) -> Self {
        Self::Known(s.into())
    }

    pub fn is_na(&self) -> bool {
        matches!(self, Self::Na)
    }

    pub fn as_str(&self) -> &str {
        match self {
            Self::Na => Self::NA_TEXT,
            Self::Known(s) => s,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == Self::NA_TEXT { Self::Na } else { Self::Known(s) })
    }
}

/// Value equality used for every vote and reward: NA matches only NA,
/// categorical values match exactly, open text matches by similarity.
#[derive(Clone, Copy)]
pub struct Matcher<'s> {
    pub similarity: &'s dyn Similarity,
    pub tau: f64,
}

impl Default for Matcher<'static> {
    fn default() -> Self {
        Self {
            similarity: &TokenCosine,
            tau: DEFAULT_TAU,
        }
    }
}

impl fmt::Debug for Matcher<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matcher").field("tau", &self.tau).finish_non_exhaustive()
    }
}

impl Matcher<'_> {
    pub fn matches(&self, space: &ValueSpace, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Na, Value::Na) => true,
            (Value::Known(x), Value::Known(y)) => match space {
                ValueSpace::Categorical(_) => x == y,
                ValueSpace::OpenText => self.similarity.score(x, y) >= self.tau,
            },
            _ => false,
        }
    }
}

/// Attribute id → value. Missing ids read as NA, so a fragment is just a
/// profile with fewer entries.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomicProfile {
    pub values: BTreeMap<String, Value>,
}

impl AtomicProfile {
    pub fn all_na(schema: &Schema) -> Self {
        Self {
            values: schema.ids().map(|id| (id.to_string(), Value::Na)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> &Value {
        const NA: Value = Value::Na;
        self.values.get(id).unwrap_or(&NA)
    }

    pub fn set(&mut self, id: &str, v: Value) {
        self.values.insert(id.to_string(), v);
    }

    pub fn with(mut self, id: &str, v: &str) -> Self {
        self.set(id, Value::known(v));
        self
    }

    /// Every id is in the schema and categorical values are declared.
    pub fn validate_fragment(&self, schema: &Schema) -> Result<(), CurateError> {
        for (id, v) in &self.values {
            let spec = schema
                .get(id)
                .ok_or_else(|| CurateError::Schema(alloc::format!("unknown attribute {id:?}")))?;
            if let (ValueSpace::Categorical(vals), Value::Known(x)) = (&spec.space, v) {
                if !vals.contains(x) {
                    return Err(CurateError::Schema(alloc::format!("{id}: {x:?} is not a declared value")));
                }
            }
        }
        Ok(())
    }

    /// A full profile: a valid fragment covering every schema attribute.
    pub fn validate(&self, schema: &Schema) -> Result<(), CurateError> {
        self.validate_fragment(schema)?;
        match schema.ids().find(|id| !self.values.contains_key(*id)) {
            Some(id) => Err(CurateError::Schema(alloc::format!("missing attribute {id:?}"))),
            None => Ok(()),
        }
    }

    /// Per-attribute agreement in schema order.
    pub fn agreement(&self, other: &Self, schema: &Schema, m: &Matcher<'_>) -> Vec<bool> {
        schema
            .attributes
            .iter()
            .map(|a| m.matches(&a.space, self.get(&a.id), other.get(&a.id)))
            .collect()
    }

    /// Fills every schema attribute not present with NA.
    pub fn completed(mut self, schema: &Schema) -> Self {
        for id in schema.ids() {
            self.values.entry(id.to_string()).or_insert(Value::Na);
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_eighteen_tags_over_five_dimensions() {
        let s = Schema::builtin();
        s.validate().unwrap();
        assert_eq!(s.k(), 18);
        for d in Dimension::ALL {
            assert!(s.attributes.iter().any(|a| a.dimension == d), "{d:?}");
        }
    }

    #[test]
    fn fragments_and_na() {
        let s = Schema::builtin();
        let p = AtomicProfile::default().with("gender", "Female");
        p.validate_fragment(&s).unwrap();
        assert!(p.validate(&s).is_err());
        assert!(p.clone().completed(&s).validate(&s).is_ok());
        assert!(AtomicProfile::default().with("gender", "Other").validate_fragment(&s).is_err());
        assert!(p.get("region").is_na());
        let json = serde_json::to_string(&AtomicProfile::all_na(&s)).unwrap();
        assert!(json.contains("\"region\":\"NA\""));
    }

    #[test]
    fn matcher_rules() {
        let m = Matcher::default();
        let cat = ValueSpace::Categorical(alloc::vec!["Yes".into(), "No".into()]);
        assert!(m.matches(&cat, &Value::Na, &Value::Na));
        assert!(!m.matches(&cat, &Value::Na, &Value::known("No")));
        assert!(m.matches(&ValueSpace::OpenText, &Value::known("fitness, travel"), &Value::known("Travel, fitness")));
        assert!(!m.matches(&ValueSpace::OpenText, &Value::known("fitness"), &Value::known("reading")));
    }
}
