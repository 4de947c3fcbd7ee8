//! Low-entropy filtering and the three consensus stage datasets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::annotate::{Annotator, AnnotatorOutput, CompositeSynth, Resynthesizer, Synthesizer};
use super::answer::{AtomicExtractor, CompositeExtractor, Extractor};
use super::error::CurateError;
use super::question::Question;
use super::rules::check_conflicts;
use super::schema::{AtomicProfile, Matcher, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Stage {
    One,
    Two,
    Three,
}

impl From<Stage> for u8 {
    fn from(s: Stage) -> u8 {
        match s {
            Stage::One => 1,
            Stage::Two => 2,
            Stage::Three => 3,
        }
    }
}

impl TryFrom<u8> for Stage {
    type Error = CurateError;
    fn try_from(n: u8) -> Result<Self, CurateError> {
        match n {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            _ => Err(CurateError::Protocol(alloc::format!("no stage {n}"))),
        }
    }
}

impl core::fmt::Display for Stage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurationConfig {
    /// Stage-1 needs at least this many agreeing outputs.
    pub stage1_threshold: usize,
    pub outputs_per_question: usize,
}

impl Default for CurationConfig {
    fn default() -> Self {
        Self {
            stage1_threshold: 4,
            outputs_per_question: 5,
        }
    }
}

impl CurationConfig {
    pub fn validate(&self) -> Result<(), CurateError> {
        if self.stage1_threshold == 0 || self.stage1_threshold > self.outputs_per_question {
            return Err(CurateError::Protocol(alloc::format!(
                "stage-1 threshold {} must lie in 1..={}",
                self.stage1_threshold,
                self.outputs_per_question
            )));
        }
        Ok(())
    }
}

/// Stage-1 acceptance: enough agreeing outputs.
pub fn stage1_accepts(votes: &[bool], threshold: usize) -> bool {
    votes.iter().filter(|v| **v).count() >= threshold
}

/// Stage-2 acceptance: a controversial question (some but not enough
/// agreement) whose resynthesis agrees.
pub fn stage2_accepts(votes: &[bool], resynth_agrees: bool, threshold: usize) -> bool {
    let s = votes.iter().filter(|v| **v).count();
    0 < s && s < threshold && resynth_agrees
}

/// Extraction plus comparison against a question's pseudo-label. Atomic
/// questions use F_a and compare one attribute; composite questions use F_c
/// and require every attribute to match.
#[derive(Clone, Copy)]
pub struct Judge<'a> {
    pub schema: &'a Schema,
    pub matcher: Matcher<'a>,
    pub atomic: &'a dyn Extractor,
    pub composite: &'a dyn Extractor,
}

impl<'a> Judge<'a> {
    pub fn new(schema: &'a Schema) -> Self {
        Self {
            schema,
            matcher: Matcher::default(),
            atomic: &AtomicExtractor,
            composite: &CompositeExtractor,
        }
    }

    fn agrees(&self, q: &Question, got: &AtomicProfile) -> bool {
        match &q.attribute_id {
            Some(a) => match self.schema.get(a) {
                Some(spec) => self.matcher.matches(&spec.space, got.get(a), q.pseudo_label.get(a)),
                None => false,
            },
            None => got.agreement(&q.pseudo_label, self.schema, &self.matcher).iter().all(|x| *x),
        }
    }

    /// Whether `text` agrees; extraction failure is a disagreeing vote.
    pub fn vote(&self, q: &Question, text: &str) -> (bool, Option<AtomicProfile>) {
        let ex = if q.attribute_id.is_some() { self.atomic } else { self.composite };
        match ex.extract(text, self.schema) {
            Ok(p) => (self.agrees(q, &p), Some(p)),
            Err(e) => {
                log::debug!("{}: extraction failed: {e}", q.question_id);
                (false, None)
            }
        }
    }

    /// Whether a direct label agrees with the pseudo-label.
    pub fn label_agrees(&self, q: &Question, label: &AtomicProfile) -> bool {
        self.agrees(q, label)
    }

    fn voted(&self, q: &Question, mut o: AnnotatorOutput) -> (bool, AnnotatorOutput) {
        let (ok, p) = self.vote(q, &o.text);
        o.extracted = p;
        (ok, o)
    }
}

impl core::fmt::Debug for Judge<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Judge").field("matcher", &self.matcher).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub question: Question,
    pub chosen_output: AnnotatorOutput,
    /// Agreement of the five stage-1 outputs; empty for stage-3 samples.
    pub vote_vector: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resynth_vote: Option<bool>,
    /// The stage whose rule accepted the sample. Replayed stage-2 samples in
    /// the stage-3 set keep `Two`.
    pub origin: Stage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDataset {
    pub stage: Stage,
    pub samples: Vec<Sample>,
}

/// One line of a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub question_id: String,
    pub stage: Stage,
    pub prompt: String,
    pub chosen_output: String,
    pub vote_vector: Vec<bool>,
}

impl StageDataset {
    pub fn records(&self, schema: &Schema) -> Vec<DatasetRecord> {
        self.samples
            .iter()
            .map(|s| DatasetRecord {
                question_id: s.question.question_id.clone(),
                stage: self.stage,
                prompt: s.question.prompt(schema),
                chosen_output: s.chosen_output.text.clone(),
                vote_vector: s.vote_vector.clone(),
            })
            .collect()
    }

    /// Re-runs each sample's acceptance rule; returns the first failing
    /// question id.
    pub fn recheck(&self, judge: &Judge<'_>, cfg: &CurationConfig) -> Result<(), String> {
        for s in &self.samples {
            let (chosen_ok, _) = judge.vote(&s.question, &s.chosen_output.text);
            let ok = chosen_ok
                && match s.origin {
                    Stage::One => stage1_accepts(&s.vote_vector, cfg.stage1_threshold),
                    Stage::Two => stage2_accepts(&s.vote_vector, s.resynth_vote == Some(true), cfg.stage1_threshold),
                    Stage::Three => s.question.attribute_id.is_none(),
                };
            if !ok {
                return Err(s.question.question_id.clone());
            }
        }
        Ok(())
    }
}

/// Keeps the questions whose annotator label disagrees with the pseudo-label.
/// A failing annotator keeps the question.
pub fn filter_low_entropy(questions: &[Question], annotator: &dyn Annotator, judge: &Judge<'_>) -> Vec<Question> {
    questions
        .iter()
        .filter(|q| match annotator.label(q) {
            Ok(label) => !judge.label_agrees(q, &label),
            Err(e) => {
                log::warn!("{}: annotator failed, keeping the question: {e}", q.question_id);
                true
            }
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage1 {
    pub dataset: StageDataset,
    /// Vote vectors for every question, accepted or not.
    pub votes: BTreeMap<String, Vec<bool>>,
}

pub fn build_stage1<R: Rng + ?Sized>(
    questions: &[Question],
    synth: &dyn Synthesizer,
    judge: &Judge<'_>,
    cfg: &CurationConfig,
    rng: &mut R,
) -> Result<Stage1, CurateError> {
    cfg.validate()?;
    let mut samples = Vec::new();
    let mut votes = BTreeMap::new();
    for q in questions {
        let outs = synth.synthesize(q)?;
        if outs.len() != cfg.outputs_per_question {
            return Err(CurateError::Protocol(alloc::format!(
                "{}: {} outputs, expected {}",
                q.question_id,
                outs.len(),
                cfg.outputs_per_question
            )));
        }
        let judged: Vec<(bool, AnnotatorOutput)> = outs.into_iter().map(|o| judge.voted(q, o)).collect();
        let v: Vec<bool> = judged.iter().map(|(ok, _)| *ok).collect();
        if stage1_accepts(&v, cfg.stage1_threshold) {
            let agreeing: Vec<&AnnotatorOutput> = judged.iter().filter(|(ok, _)| *ok).map(|(_, o)| o).collect();
            let chosen = (*agreeing.choose(rng).expect("threshold is at least one")).clone();
            samples.push(Sample {
                question: q.clone(),
                chosen_output: chosen,
                vote_vector: v.clone(),
                resynth_vote: None,
                origin: Stage::One,
            });
        }
        votes.insert(q.question_id.clone(), v);
    }
    Ok(Stage1 {
        dataset: StageDataset {
            stage: Stage::One,
            samples,
        },
        votes,
    })
}

/// Resynthesizes controversial questions once each; failures drop the
/// question.
pub fn build_stage2(
    questions: &[Question],
    votes: &BTreeMap<String, Vec<bool>>,
    resynth: &dyn Resynthesizer,
    judge: &Judge<'_>,
    cfg: &CurationConfig,
) -> Result<StageDataset, CurateError> {
    cfg.validate()?;
    let mut samples = Vec::new();
    for q in questions {
        let v = votes
            .get(&q.question_id)
            .ok_or_else(|| CurateError::Protocol(alloc::format!("{}: no stage-1 votes", q.question_id)))?;
        // resynthesis is only worth paying for on controversial questions
        if !stage2_accepts(v, true, cfg.stage1_threshold) {
            continue;
        }
        let o = match resynth.resynthesize(q) {
            Ok(o) => o,
            Err(e) => {
                log::warn!("{}: resynthesis failed, dropping: {e}", q.question_id);
                continue;
            }
        };
        let (ok, o) = judge.voted(q, o);
        if stage2_accepts(v, ok, cfg.stage1_threshold) {
            samples.push(Sample {
                question: q.clone(),
                chosen_output: o,
                vote_vector: v.clone(),
                resynth_vote: Some(true),
                origin: Stage::Two,
            });
        }
    }
    Ok(StageDataset {
        stage: Stage::Two,
        samples,
    })
}

/// D': `n` stage-2 samples drawn without replacement, in dataset order.
pub fn stage2_subset<R: Rng + ?Sized>(stage2: &StageDataset, n: usize, rng: &mut R) -> Vec<Sample> {
    let n = n.min(stage2.samples.len());
    let mut idx = sample(rng, stage2.samples.len(), n).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| stage2.samples[i].clone()).collect()
}

/// Composite samples with strict all-attribute alignment, plus D'. Seeds
/// whose pseudo-labels conflict are skipped, as are failed compositions.
pub fn build_stage3(
    seeds: &[Question],
    composer: &dyn CompositeSynth,
    judge: &Judge<'_>,
    d_prime: Vec<Sample>,
) -> Result<StageDataset, CurateError> {
    let mut samples = Vec::new();
    for q in seeds {
        if q.attribute_id.is_some() {
            return Err(CurateError::Protocol(alloc::format!("{}: stage-3 seeds are composite questions", q.question_id)));
        }
        let conflicts = check_conflicts(&q.pseudo_label);
        if !conflicts.is_empty() {
            log::info!("{}: inconsistent pseudo-label, not a seed ({})", q.question_id, conflicts[0].rule);
            continue;
        }
        let o = match composer.compose(q) {
            Ok(o) => o,
            Err(e) => {
                log::warn!("{}: composition failed, dropping: {e}", q.question_id);
                continue;
            }
        };
        let (ok, o) = judge.voted(q, o);
        if ok {
            samples.push(Sample {
                question: q.clone(),
                chosen_output: o,
                vote_vector: Vec::new(),
                resynth_vote: None,
                origin: Stage::Three,
            });
        }
    }
    samples.extend(d_prime);
    Ok(StageDataset {
        stage: Stage::Three,
        samples,
    })
}
