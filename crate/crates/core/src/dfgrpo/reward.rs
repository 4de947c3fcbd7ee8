//! Format, atomic-accuracy and summary-quality rewards.

use serde::{Deserialize, Serialize};

use super::error::GrpoError;
use crate::curate::{check_conflicts, parse_answer, AtomicProfile, Extractor, Matcher, Schema, SummaryExtractor};
use crate::text::count_tokens;

/// 1 iff the output follows the think/answer grammar with a valid body.
pub fn reward_format(text: &str) -> u8 {
    u8::from(parse_answer(text).is_ok())
}

/// Fraction of schema attributes whose extracted value matches the truth.
pub fn reward_atomic(extracted: &AtomicProfile, gt: &AtomicProfile, schema: &Schema, m: &Matcher<'_>) -> f64 {
    if schema.k() == 0 {
        return 0.0;
    }
    let hits = extracted.agreement(gt, schema, m).into_iter().filter(|x| *x).count();
    hits as f64 / schema.k() as f64
}

/// Judge scores, each on 0..=10.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JudgeScores {
    pub completeness: f64,
    pub consistency: f64,
    pub conciseness: f64,
    pub aesthetics: f64,
}

impl JudgeScores {
    pub const MAX: f64 = 10.0;

    fn as_array(&self) -> [f64; 4] {
        [self.completeness, self.consistency, self.conciseness, self.aesthetics]
    }
}

pub trait SummaryJudge {
    fn judge(&self, summary: &str) -> Result<JudgeScores, alloc::string::String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryWeights(pub [f64; 4]);

impl Default for SummaryWeights {
    fn default() -> Self {
        Self([0.4, 0.3, 0.15, 0.15])
    }
}

impl SummaryWeights {
    pub fn validate(&self) -> Result<(), GrpoError> {
        let sum: f64 = self.0.iter().sum();
        if self.0.iter().any(|w| !(*w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(GrpoError::Config(alloc::format!("summary weights {:?} must be nonnegative and sum to 1", self.0)));
        }
        Ok(())
    }
}

/// Weighted judge score scaled to [0, 1]. A judge failure or an
/// out-of-range score gives 0.
pub fn reward_summary(summary: &str, judge: &dyn SummaryJudge, w: &SummaryWeights) -> Result<f64, GrpoError> {
    w.validate()?;
    let s = match judge.judge(summary) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("summary judge failed: {e}");
            return Ok(0.0);
        }
    };
    let scores = s.as_array();
    if scores.iter().any(|x| !(0.0..=JudgeScores::MAX).contains(x)) {
        log::warn!("summary judge returned out-of-range scores {scores:?}");
        return Ok(0.0);
    }
    Ok(scores.iter().zip(w.0).map(|(s, w)| w * s / JudgeScores::MAX).sum())
}

/// Rubric judge over template prose: completeness counts stated
/// attributes, consistency checks label conflicts, conciseness penalizes
/// summaries past `target_tokens`, aesthetics wants capitalized sentences
/// ending in a period.
#[derive(Debug, Clone)]
pub struct RubricJudge {
    pub schema: Schema,
    pub target_tokens: usize,
}

impl SummaryJudge for RubricJudge {
    fn judge(&self, summary: &str) -> Result<JudgeScores, alloc::string::String> {
        let stated = SummaryExtractor.extract(summary, &self.schema).map_err(|e| alloc::format!("{e}"))?;
        let known = stated.values.values().filter(|v| !v.is_na()).count();
        let n = count_tokens(summary).max(1);
        let t = summary.trim();
        let tidy = t.ends_with('.') && t.chars().next().is_some_and(char::is_uppercase);
        Ok(JudgeScores {
            completeness: JudgeScores::MAX * known as f64 / self.schema.k().max(1) as f64,
            consistency: if check_conflicts(&stated).is_empty() { JudgeScores::MAX } else { 0.0 },
            conciseness: JudgeScores::MAX * (self.target_tokens as f64 / n as f64).min(1.0),
            aesthetics: if tidy { JudgeScores::MAX } else { JudgeScores::MAX / 2.0 },
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub format: u8,
    pub atomic: f64,
    pub summary: f64,
    /// atomic + summary for well-formed outputs; 0 otherwise.
    pub total: f64,
}

impl RewardBreakdown {
    pub fn new(format: u8, atomic: f64, summary: f64) -> Self {
        Self {
            format,
            atomic,
            summary,
            total: if format == 1 { atomic + summary } else { 0.0 },
        }
    }
}

/// Scores a composite output: format, atomic accuracy of F_c(text) and the
/// judged summary. Malformed outputs score zero throughout.
pub fn score_output(
    text: &str,
    gt: &AtomicProfile,
    schema: &Schema,
    extractor: &dyn Extractor,
    m: &Matcher<'_>,
    judge: Option<(&dyn SummaryJudge, &SummaryWeights)>,
) -> Result<RewardBreakdown, GrpoError> {
    let Ok(answer) = parse_answer(text) else {
        return Ok(RewardBreakdown::new(0, 0.0, 0.0));
    };
    let atomic = match extractor.extract(text, schema) {
        Ok(p) => reward_atomic(&p, gt, schema, m),
        Err(_) => 0.0,
    };
    let summary = match (judge, answer.summary()) {
        (Some((j, w)), Some(s)) => reward_summary(s, j, w)?,
        (Some((_, w)), None) => {
            w.validate()?;
            0.0
        }
        (None, _) => 0.0,
    };
    Ok(RewardBreakdown::new(1, atomic, summary))
}
