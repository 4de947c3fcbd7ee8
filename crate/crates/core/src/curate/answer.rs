//! The structured answer grammar shared by annotators, the policy and the
//! extractors:
//!
//! ```text
//! <think>free-form reasoning</think>
//! <answer>{"gender": "Female", "hobbies": ["fitness", "travel"], "summary": "..."}</answer>
//! ```
//!
//! The answer body is a JSON object whose values are strings or string
//! lists. Keys are attribute ids plus an optional `summary`. Only whitespace
//! may surround the two blocks.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde_json::Value as Json;

use super::error::CurateError;
use super::schema::{AtomicProfile, Schema, Value, ValueSpace};

pub const SUMMARY_KEY: &str = "summary";

#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub think: String,
    pub body: BTreeMap<String, Json>,
}

impl Answer {
    pub fn summary(&self) -> Option<&str> {
        self.body.get(SUMMARY_KEY).and_then(Json::as_str)
    }
}

fn block<'a>(text: &'a str, tag: &str) -> Result<(&'a str, &'a str, &'a str), CurateError> {
    let open = alloc::format!("<{tag}>");
    let close = alloc::format!("</{tag}>");
    let err = |m: &str| CurateError::Extraction(alloc::format!("{tag} block {m}"));
    let s = text.find(&open).ok_or_else(|| err("missing"))?;
    let inner_start = s + open.len();
    let e = text[inner_start..].find(&close).ok_or_else(|| err("unclosed"))? + inner_start;
    if text[e + close.len()..].contains(&open) || text[inner_start..e].contains(&open) {
        return Err(err("repeated"));
    }
    Ok((&text[..s], &text[inner_start..e], &text[e + close.len()..]))
}

/// Parses an output under the answer grammar.
pub fn parse_answer(text: &str) -> Result<Answer, CurateError> {
    let (before, think, rest) = block(text, "think")?;
    let (between, body, after) = block(rest, "answer")?;
    if !before.trim().is_empty() || !between.trim().is_empty() || !after.trim().is_empty() {
        return Err(CurateError::Extraction("text outside the think/answer blocks".into()));
    }
    let parsed: Json = serde_json::from_str(body.trim())
        .map_err(|e| CurateError::Extraction(alloc::format!("answer body: {e}")))?;
    let Json::Object(map) = parsed else {
        return Err(CurateError::Extraction("answer body is not an object".into()));
    };
    let mut out = BTreeMap::new();
    for (k, v) in map {
        let ok = match &v {
            Json::String(_) => true,
            Json::Array(xs) => xs.iter().all(Json::is_string),
            _ => false,
        };
        if !ok {
            return Err(CurateError::Extraction(alloc::format!("{k}: values must be strings or string lists")));
        }
        out.insert(k, v);
    }
    Ok(Answer {
        think: think.trim().to_string(),
        body: out,
    })
}

fn is_unknown(s: &str) -> bool {
    let s = s.trim();
    s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("unknown")
}

fn value_of(schema: &Schema, id: &str, v: &Json) -> Result<Value, CurateError> {
    let spec = schema.get(id).expect("caller checked the id");
    let text = match v {
        Json::String(s) => s.clone(),
        Json::Array(xs) => {
            if matches!(spec.space, ValueSpace::Categorical(_)) {
                return Err(CurateError::Extraction(alloc::format!("{id}: list given for a categorical attribute")));
            }
            xs.iter().filter_map(Json::as_str).collect::<Vec<_>>().join(", ")
        }
        _ => unreachable!("parse_answer admits strings and lists only"),
    };
    if is_unknown(&text) {
        return Ok(Value::Na);
    }
    spec.canonical_value(&text)
        .map(Value::Known)
        .ok_or_else(|| CurateError::Extraction(alloc::format!("{id}: {text:?} is not a declared value")))
}

fn attributes_of(a: &Answer, schema: &Schema) -> Result<AtomicProfile, CurateError> {
    let mut p = AtomicProfile::default();
    for (k, v) in &a.body {
        if schema.get(k).is_some() {
            p.set(k, value_of(schema, k, v)?);
        }
    }
    Ok(p)
}

/// Atomic extraction: every schema attribute, NA where the answer is silent.
pub fn extract_atomic(text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
    Ok(attributes_of(&parse_answer(text)?, schema)?.completed(schema))
}

/// Composite extraction: attributes stated in the answer body, then any the
/// summary prose states, for a complete profile.
pub fn extract_composite(text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
    let a = parse_answer(text)?;
    let summary = a
        .summary()
        .filter(|s| !s.trim().is_empty())
        .ok_or_else(|| CurateError::Extraction("composite answer has no summary".into()))?;
    let mut p = attributes_of(&a, schema)?;
    for (id, v) in extract_from_summary(summary, schema)?.values {
        if !p.values.contains_key(&id) {
            p.values.insert(id, v);
        }
    }
    Ok(p.completed(schema))
}

/// An extraction operator over output text: F_a for atomic answers, F_c for
/// composite ones.
pub trait Extractor {
    fn extract(&self, text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError>;
}

impl<F> Extractor for F
where
    F: Fn(&str, &Schema) -> Result<AtomicProfile, CurateError>,
{
    fn extract(&self, text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
        self(text, schema)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AtomicExtractor;

impl Extractor for AtomicExtractor {
    fn extract(&self, text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
        extract_atomic(text, schema)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompositeExtractor;

impl Extractor for CompositeExtractor {
    fn extract(&self, text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
        extract_composite(text, schema)
    }
}

/// Reads template summary prose; no answer block involved.
#[derive(Debug, Clone, Copy, Default)]
pub struct SummaryExtractor;

impl Extractor for SummaryExtractor {
    fn extract(&self, text: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
        extract_from_summary(text, schema)
    }
}

/// Reads `Label: value.` sentences back out of a rendered summary.
pub fn extract_from_summary(summary: &str, schema: &Schema) -> Result<AtomicProfile, CurateError> {
    let mut p = AtomicProfile::default();
    for spec in &schema.attributes {
        let key = alloc::format!("{}: ", spec.label);
        let mut from = 0;
        while let Some(off) = summary[from..].find(&key) {
            let at = from + off;
            from = at + key.len();
            if at != 0 && !summary[..at].ends_with(". ") {
                continue;
            }
            let rest = &summary[from..];
            let end = rest.find(". ").unwrap_or_else(|| rest.trim_end().trim_end_matches('.').len());
            let raw = rest[..end].trim_end_matches('.');
            let v = value_of(schema, &spec.id, &Json::String(raw.to_string()))?;
            p.set(&spec.id, v);
            break;
        }
    }
    Ok(p)
}

/// Template prose for a profile: one `Label: value.` sentence per known
/// attribute, in schema order.
pub fn render_summary(profile: &AtomicProfile, schema: &Schema) -> String {
    let mut parts: Vec<String> = alloc::vec!["User profile.".into()];
    for spec in &schema.attributes {
        if let Value::Known(v) = profile.get(&spec.id) {
            parts.push(alloc::format!("{}: {}.", spec.label, v));
        }
    }
    parts.join(" ")
}

/// A well-formed output carrying `profile`'s known attributes (NA ones are
/// written as "NA") and an optional summary.
pub fn render_output(think: &str, profile: &AtomicProfile, summary: Option<&str>) -> String {
    let mut map = serde_json::Map::new();
    for (k, v) in &profile.values {
        map.insert(k.clone(), Json::String(v.as_str().to_string()));
    }
    if let Some(s) = summary {
        map.insert(SUMMARY_KEY.into(), Json::String(s.to_string()));
    }
    let body = serde_json::to_string(&Json::Object(map)).expect("string map serializes");
    alloc::format!("<think>{think}</think>\n<answer>{body}</answer>")
}
