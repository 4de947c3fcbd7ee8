//! Teacher interfaces and a seeded, table-driven mock of all of them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::answer::{render_output, render_summary};
use super::error::CurateError;
use super::question::Question;
use super::schema::{AtomicProfile, AttributeSpec, Schema, Value, ValueSpace};
use crate::rng::{derive_seed, seeded, SimRng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatorOutput {
    pub question_id: String,
    pub annotator_id: String,
    pub text: String,
    /// F(text), filled in once a stage has run the extractor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extracted: Option<AtomicProfile>,
}

/// Labels a question directly, for low-entropy filtering.
pub trait Annotator {
    fn label(&self, q: &Question) -> Result<AtomicProfile, CurateError>;
}

/// The stage-1 teachers: five outputs per question across two sources.
pub trait Synthesizer {
    fn synthesize(&self, q: &Question) -> Result<Vec<AnnotatorOutput>, CurateError>;
}

/// The stronger single-shot teacher for controversial questions.
pub trait Resynthesizer {
    fn resynthesize(&self, q: &Question) -> Result<AnnotatorOutput, CurateError>;
}

/// Writes a composite profile for a seed user.
pub trait CompositeSynth {
    fn compose(&self, q: &Question) -> Result<AnnotatorOutput, CurateError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockSource {
    pub id: String,
    pub outputs: usize,
}

/// Forced behavior for one question id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockOverride {
    /// Whether `label` agrees with the pseudo-label.
    pub label: Option<bool>,
    /// Per-output agreement; its length sets the output count.
    pub votes: Option<Vec<bool>>,
    pub resynth: Option<bool>,
    pub composite: Option<bool>,
    /// Every call on this question fails.
    pub fail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockConfig {
    pub seed: u64,
    pub sources: Vec<MockSource>,
    pub label_agree_rate: f64,
    pub vote_agree_rate: f64,
    /// Outputs that break the answer grammar; these never agree.
    pub malformed_rate: f64,
    pub resynth_agree_rate: f64,
    pub composite_agree_rate: f64,
    pub overrides: BTreeMap<String, MockOverride>,
}

impl Default for MockConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sources: alloc::vec![
                MockSource {
                    id: "teacher-a".into(),
                    outputs: 3
                },
                MockSource {
                    id: "teacher-b".into(),
                    outputs: 2
                },
            ],
            label_agree_rate: 0.49,
            vote_agree_rate: 0.75,
            malformed_rate: 0.05,
            resynth_agree_rate: 0.6,
            composite_agree_rate: 0.5,
            overrides: BTreeMap::new(),
        }
    }
}

impl MockConfig {
    pub fn validate(&self) -> Result<(), CurateError> {
        for (name, r) in [
            ("label_agree_rate", self.label_agree_rate),
            ("vote_agree_rate", self.vote_agree_rate),
            ("malformed_rate", self.malformed_rate),
            ("resynth_agree_rate", self.resynth_agree_rate),
            ("composite_agree_rate", self.composite_agree_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(CurateError::Annotator(alloc::format!("{name} = {r} is not a probability")));
            }
        }
        if self.sources.is_empty() {
            return Err(CurateError::Annotator("mock needs at least one source".into()));
        }
        Ok(())
    }
}

/// Answers by copying or corrupting the question's own pseudo-label, so
/// agreement rates are exact knobs. Every draw is keyed by seed, call kind,
/// question id and slot, so results do not depend on call order.
#[derive(Debug, Clone)]
pub struct MockTeacher {
    pub config: MockConfig,
    pub schema: Schema,
}

fn wrong_value(spec: &AttributeSpec, truth: &Value, rng: &mut SimRng) -> Value {
    match &spec.space {
        ValueSpace::Categorical(vals) => {
            let mut pool: Vec<Value> = vals.iter().map(Value::known).collect();
            pool.push(Value::Na);
            pool.retain(|v| v != truth);
            pool.choose(rng).cloned().unwrap_or(Value::Na)
        }
        ValueSpace::OpenText => match truth {
            Value::Na => Value::known("miscellaneous"),
            Value::Known(_) => Value::Na,
        },
    }
}

impl MockTeacher {
    pub fn new(config: MockConfig, schema: Schema) -> Result<Self, CurateError> {
        config.validate()?;
        Ok(Self { config, schema })
    }

    fn rng(&self, kind: &str, q: &Question, slot: usize) -> SimRng {
        seeded(derive_seed(self.config.seed, &alloc::format!("{kind}:{}:{slot}", q.question_id)))
    }

    fn over(&self, q: &Question) -> Result<Option<&MockOverride>, CurateError> {
        match self.config.overrides.get(&q.question_id) {
            Some(o) if o.fail => Err(CurateError::Annotator(alloc::format!("mock failure on {}", q.question_id))),
            o => Ok(o),
        }
    }

    /// The question's target, or a version with one attribute corrupted.
    fn answer(&self, q: &Question, agree: bool, rng: &mut SimRng) -> AtomicProfile {
        let mut p = q.target();
        if !agree {
            let ids: Vec<String> = p.values.keys().cloned().collect();
            if let Some(id) = ids.choose(rng) {
                let spec = self.schema.get(id).expect("pseudo-labels use schema ids");
                let v = wrong_value(spec, p.get(id), rng);
                p.set(id, v);
            }
        }
        p
    }

    fn output(&self, q: &Question, annotator: &str, agree: bool, malformed: bool, rng: &mut SimRng) -> AnnotatorOutput {
        let think = alloc::format!("reviewed the behavior of {}", q.user_id);
        let text = if malformed {
            alloc::format!("<think>{think}</think>\n<answer>{{\"")
        } else {
            let p = self.answer(q, agree, rng);
            let summary = q.attribute_id.is_none().then(|| render_summary(&p, &self.schema));
            render_output(&think, &p, summary.as_deref())
        };
        AnnotatorOutput {
            question_id: q.question_id.clone(),
            annotator_id: annotator.into(),
            text,
            extracted: None,
        }
    }
}

impl Annotator for MockTeacher {
    fn label(&self, q: &Question) -> Result<AtomicProfile, CurateError> {
        let forced = self.over(q)?.and_then(|o| o.label);
        let mut rng = self.rng("label", q, 0);
        let agree = forced.unwrap_or_else(|| rng.gen_bool(self.config.label_agree_rate));
        Ok(self.answer(q, agree, &mut rng))
    }
}

impl Synthesizer for MockTeacher {
    fn synthesize(&self, q: &Question) -> Result<Vec<AnnotatorOutput>, CurateError> {
        let forced = self.over(q)?.and_then(|o| o.votes.clone());
        let slots: Vec<String> = self
            .config
            .sources
            .iter()
            .flat_map(|s| (0..s.outputs).map(move |i| alloc::format!("{}#{i}", s.id)))
            .collect();
        let n = forced.as_ref().map_or(slots.len(), Vec::len);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut rng = self.rng("synth", q, i);
            let id = slots.get(i).cloned().unwrap_or_else(|| alloc::format!("extra#{i}"));
            let o = match &forced {
                Some(v) => self.output(q, &id, v[i], false, &mut rng),
                None => {
                    let malformed = rng.gen_bool(self.config.malformed_rate);
                    let agree = rng.gen_bool(self.config.vote_agree_rate);
                    self.output(q, &id, agree, malformed, &mut rng)
                }
            };
            out.push(o);
        }
        Ok(out)
    }
}

impl Resynthesizer for MockTeacher {
    fn resynthesize(&self, q: &Question) -> Result<AnnotatorOutput, CurateError> {
        let forced = self.over(q)?.and_then(|o| o.resynth);
        let mut rng = self.rng("resynth", q, 0);
        let agree = forced.unwrap_or_else(|| rng.gen_bool(self.config.resynth_agree_rate));
        Ok(self.output(q, "resynth", agree, false, &mut rng))
    }
}

impl CompositeSynth for MockTeacher {
    fn compose(&self, q: &Question) -> Result<AnnotatorOutput, CurateError> {
        let forced = self.over(q)?.and_then(|o| o.composite);
        let mut rng = self.rng("composite", q, 0);
        let agree = forced.unwrap_or_else(|| rng.gen_bool(self.config.composite_agree_rate));
        Ok(self.output(q, "composite", agree, false, &mut rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curate::question::{atomic_questions, composite_question};
    use crate::curate::{extract_atomic, extract_composite};

    fn pseudo(s: &Schema) -> AtomicProfile {
        AtomicProfile::default()
            .with("gender", "Female")
            .with("hobbies", "fitness")
            .completed(s)
    }

    #[test]
    fn outputs_follow_forced_votes() {
        let s = Schema::builtin();
        let q = &atomic_questions("u1", "", &pseudo(&s), &s)[3];
        let mut cfg = MockConfig::default();
        cfg.overrides.insert(
            q.question_id.clone(),
            MockOverride {
                votes: Some(alloc::vec![true, false, true, false, true]),
                ..Default::default()
            },
        );
        let m = MockTeacher::new(cfg, s.clone()).unwrap();
        let outs = m.synthesize(q).unwrap();
        assert_eq!(outs.len(), 5);
        let got: Vec<bool> = outs
            .iter()
            .map(|o| extract_atomic(&o.text, &s).unwrap().get("gender") == &Value::known("Female"))
            .collect();
        assert_eq!(got, [true, false, true, false, true]);
        assert_eq!(outs[0].annotator_id, "teacher-a#0");
        assert_eq!(outs[4].annotator_id, "teacher-b#1");
    }

    #[test]
    fn deterministic_and_composite_parses() {
        let s = Schema::builtin();
        let q = composite_question("u1", "", &pseudo(&s));
        let m = MockTeacher::new(MockConfig::default(), s.clone()).unwrap();
        assert_eq!(m.compose(&q).unwrap(), m.compose(&q).unwrap());
        let p = extract_composite(&m.compose(&q).unwrap().text, &s).unwrap();
        p.validate(&s).unwrap();
    }

    #[test]
    fn failure_override_and_bad_rates() {
        let s = Schema::builtin();
        let q = &atomic_questions("u1", "", &pseudo(&s), &s)[0];
        let mut cfg = MockConfig::default();
        cfg.overrides.insert(q.question_id.clone(), MockOverride { fail: true, ..Default::default() });
        let m = MockTeacher::new(cfg, s.clone()).unwrap();
        assert!(m.label(q).is_err());
        let bad = MockConfig {
            malformed_rate: 1.5,
            ..Default::default()
        };
        assert!(MockTeacher::new(bad, s).is_err());
    }
}
