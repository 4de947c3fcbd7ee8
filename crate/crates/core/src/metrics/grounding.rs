//! Grounding of a composite summary in the atomic ground truth.

use serde::{Deserialize, Serialize};

use super::bleu::bleu_n;
use crate::curate::{AtomicProfile, Extractor, Matcher, Schema};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Grounding {
    /// Extracted attributes that match the ground truth.
    pub acc_ex: f64,
    /// Known ground-truth attributes the summary states.
    pub cov_ex: f64,
}

/// Acc_Ex and COV_Ex. A ground truth with no known attributes is fully
/// covered; a summary stating nothing has accuracy 0. Extraction failure
/// scores 0 on both.
pub fn grounding_eval(
    summary: &str,
    gt: &AtomicProfile,
    schema: &Schema,
    extractor: &dyn Extractor,
    matcher: &Matcher<'_>,
) -> Grounding {
    let got = match extractor.extract(summary, schema) {
        Ok(p) => p,
        Err(e) => {
            log::warn!("grounding: extraction failed: {e}");
            return Grounding::default();
        }
    };
    let (mut extracted, mut correct, mut known, mut covered) = (0usize, 0usize, 0usize, 0usize);
    for spec in &schema.attributes {
        let (g, x) = (gt.get(&spec.id), got.get(&spec.id));
        if !x.is_na() {
            extracted += 1;
            if matcher.matches(&spec.space, x, g) {
                correct += 1;
            }
        }
        if !g.is_na() {
            known += 1;
            if !x.is_na() {
                covered += 1;
            }
        }
    }
    Grounding {
        acc_ex: if extracted == 0 { 0.0 } else { correct as f64 / extracted as f64 },
        cov_ex: if known == 0 { 1.0 } else { covered as f64 / known as f64 },
    }
}

/// Summary-level scores against a reference summary and the atomic truth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryEval {
    pub acc_ex: f64,
    pub cov_ex: f64,
    pub bleu2: f64,
    pub bleu4: f64,
    /// Whole-summary similarity to the reference.
    pub score_sim: f64,
}

pub fn summary_eval(
    summary: &str,
    reference: &str,
    gt: &AtomicProfile,
    schema: &Schema,
    extractor: &dyn Extractor,
    matcher: &Matcher<'_>,
) -> SummaryEval {
    let g = grounding_eval(summary, gt, schema, extractor, matcher);
    SummaryEval {
        acc_ex: g.acc_ex,
        cov_ex: g.cov_ex,
        bleu2: bleu_n(summary, reference, 2).unwrap_or(0.0),
        bleu4: bleu_n(summary, reference, 4).unwrap_or(0.0),
        score_sim: matcher.similarity.score(summary, reference),
    }
}
