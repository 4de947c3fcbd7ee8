//! Gradient-ascent trainer and the bandit toy task.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::GrpoConfig;
use super::error::GrpoError;
use super::group::{dual_filter, FilterCounts, Rollout, RolloutGroup};
use super::objective::grpo_objective;
use super::policy::ToyPolicy;
use super::reward::{reward_atomic, reward_format, RewardBreakdown};
use crate::curate::{extract_atomic, AtomicProfile, Matcher, Schema};
use crate::rng::seeded;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLogEntry {
    pub step: usize,
    pub active_groups: usize,
    pub filtered_low: usize,
    pub filtered_high: usize,
    pub unusable_groups: usize,
    pub truncated_samples: usize,
    pub format_failed_samples: usize,
    /// Outputs that entered the objective.
    pub contributing_outputs: usize,
    /// Mean total reward over every sampled output, filtered or not.
    pub mean_reward: f64,
    pub objective: f64,
    pub grad_norm: f64,
}

impl TrainLogEntry {
    pub fn line(&self) -> String {
        alloc::format!(
            "step={} active_groups={} filtered_low={} filtered_high={} unusable_groups={} truncated={} format_failed={} contributing={} mean_reward={:.6} objective={:.6} grad_norm={:.6}",
            self.step,
            self.active_groups,
            self.filtered_low,
            self.filtered_high,
            self.unusable_groups,
            self.truncated_samples,
            self.format_failed_samples,
            self.contributing_outputs,
            self.mean_reward,
            self.objective,
            self.grad_norm
        )
    }
}

/// theta + step_size * grad(J); rejects non-finite results.
pub fn train_step(
    policy: &ToyPolicy,
    old: &ToyPolicy,
    reference: &ToyPolicy,
    groups: &[RolloutGroup],
    cfg: &GrpoConfig,
    step_size: f64,
) -> Result<(ToyPolicy, f64, f64), GrpoError> {
    let o = grpo_objective(policy, old, reference, groups, cfg)?;
    if !o.value.is_finite() {
        return Err(GrpoError::NonFiniteUpdate);
    }
    let mut next = policy.clone();
    for (x, g) in next.logits.iter_mut().zip(&o.grad) {
        *x += step_size * g;
    }
    if next.logits.iter().any(|x| !x.is_finite()) {
        return Err(GrpoError::NonFiniteUpdate);
    }
    let norm = o.grad_norm();
    Ok((next, o.value, norm))
}

/// Filters a sampled batch, takes one ascent step and logs it.
pub fn filtered_step(
    step: usize,
    policy: &ToyPolicy,
    reference: &ToyPolicy,
    mut groups: Vec<RolloutGroup>,
    cfg: &GrpoConfig,
    step_size: f64,
) -> Result<(ToyPolicy, TrainLogEntry), GrpoError> {
    let all: Vec<f64> = groups.iter().flat_map(|g| g.outputs.iter().map(|o| o.reward.total)).collect();
    let mean_reward = if all.is_empty() { 0.0 } else { all.iter().sum::<f64>() / all.len() as f64 };
    let counts: FilterCounts = dual_filter(&mut groups, cfg);
    let o = grpo_objective(policy, policy, reference, &groups, cfg)?;
    let (next, objective, grad_norm) = train_step(policy, policy, reference, &groups, cfg, step_size)?;
    Ok((
        next,
        TrainLogEntry {
            step,
            active_groups: counts.active_groups,
            filtered_low: counts.filtered_low,
            filtered_high: counts.filtered_high,
            unusable_groups: counts.unusable_groups,
            truncated_samples: counts.truncated_samples,
            format_failed_samples: counts.format_failed_samples,
            contributing_outputs: o.terms,
            mean_reward,
            objective,
            grad_norm,
        },
    ))
}

/// The bandit toy: after a think token the policy picks an answer piece;
/// only the one naming the true life stage earns reward 1. A broken piece
/// fails the format reward and a filler token can run the output into the
/// length cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BanditConfig {
    pub grpo: GrpoConfig,
    pub prompts: usize,
    pub groups_per_step: usize,
    pub step_size: f64,
    pub seed: u64,
}

impl Default for BanditConfig {
    fn default() -> Self {
        Self {
            grpo: GrpoConfig::default(),
            prompts: 4,
            groups_per_step: 8,
            step_size: 0.5,
            seed: 0,
        }
    }
}

pub const EOS: u32 = 0;
const THINK: u32 = 1;
const FILLER: u32 = 5;

/// Text of each token.
pub const BANDIT_VOCAB: [&str; 6] = [
    "",
    "<think>diapers and formula every month</think>",
    "<answer>{\"life_stage\": \"Family-oriented\"}</answer>",
    "<answer>{\"life_stage\": \"Single\"}</answer>",
    "<answer>{\"life_stage\": }</answer>",
    " ",
];

pub struct Bandit {
    pub config: BanditConfig,
    pub schema: Schema,
    pub truth: AtomicProfile,
    pub reference: ToyPolicy,
}

impl Bandit {
    pub fn new(config: BanditConfig) -> Result<Self, GrpoError> {
        config.grpo.validate()?;
        if config.prompts == 0 || config.groups_per_step == 0 || !(config.step_size > 0.0) {
            return Err(GrpoError::Config("bandit needs prompts, groups and a positive step size".into()));
        }
        let life = Schema::builtin().get("life_stage").cloned().expect("builtin schema has life_stage");
        let schema = Schema { attributes: alloc::vec![life] };
        let truth = AtomicProfile::default().with("life_stage", "Family-oriented");
        // a format-aware start that prefers the wrong answer
        let v = BANDIT_VOCAB.len();
        let mut reference = ToyPolicy::new(v, config.prompts);
        for p in 0..config.prompts {
            reference.row_mut(p)[THINK as usize] = 3.0;
        }
        let after = |tok: u32| config.prompts + tok as usize;
        reference.row_mut(after(THINK)).copy_from_slice(&[-1.0, -2.0, 0.0, 1.0, 0.0, 0.5]);
        for ans in 2..5 {
            reference.row_mut(after(ans))[EOS as usize] = 3.0;
        }
        reference.row_mut(after(FILLER)).copy_from_slice(&[-1.0, -2.0, 0.0, 0.5, 0.0, 1.0]);
        Ok(Self {
            config,
            schema,
            truth,
            reference,
        })
    }

    pub fn text(tokens: &[u32]) -> String {
        tokens.iter().map(|t| BANDIT_VOCAB[*t as usize]).collect()
    }

    pub fn reward(&self, tokens: &[u32]) -> RewardBreakdown {
        let text = Self::text(tokens);
        let format = reward_format(&text);
        let atomic = match extract_atomic(&text, &self.schema) {
            Ok(p) if format == 1 => reward_atomic(&p, &self.truth, &self.schema, &Matcher::default()),
            _ => 0.0,
        };
        RewardBreakdown::new(format, atomic, 0.0)
    }

    pub fn rollouts<R: Rng + ?Sized>(&self, policy: &ToyPolicy, rng: &mut R) -> Vec<RolloutGroup> {
        let g = self.config.grpo.group_size;
        (0..self.config.groups_per_step)
            .map(|i| {
                let prompt = i % self.config.prompts;
                let outs = (0..g)
                    .map(|_| {
                        let tokens = policy.sample(prompt, EOS, self.config.grpo.max_len, rng);
                        let reward = self.reward(&tokens);
                        Rollout { tokens, reward }
                    })
                    .collect();
                RolloutGroup::new(alloc::format!("q{prompt}"), prompt, outs)
            })
            .collect()
    }

    /// Trains from the reference policy for `steps` steps.
    pub fn train(&self, steps: usize) -> Result<(ToyPolicy, Vec<TrainLogEntry>), GrpoError> {
        let mut rng = seeded(self.config.seed);
        let mut policy = self.reference.clone();
        let mut log = Vec::with_capacity(steps);
        for step in 0..steps {
            let groups = self.rollouts(&policy, &mut rng);
            let (next, entry) = filtered_step(step, &policy, &self.reference, groups, &self.config.grpo, self.config.step_size)?;
            log::debug!("{}", entry.line());
            policy = next;
            log.push(entry);
        }
        Ok((policy, log))
    }

    /// Expected reward of one output under `policy`, by Monte Carlo.
    pub fn expected_reward(&self, policy: &ToyPolicy, draws: usize, seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let mut sum = 0.0;
        for i in 0..draws {
            let t = policy.sample(i % self.config.prompts, EOS, self.config.grpo.max_len, &mut rng);
            sum += self.reward(&t).total;
        }
        sum / draws as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandit_rewards() {
        let b = Bandit::new(BanditConfig::default()).unwrap();
        assert_eq!(b.reward(&[1, 2, 0]).total, 1.0);
        assert_eq!(b.reward(&[1, 3, 0]), RewardBreakdown::new(1, 0.0, 0.0));
        assert_eq!(b.reward(&[1, 4, 0]).format, 0);
        assert_eq!(b.reward(&[2, 0]).format, 0);
    }

    #[test]
    fn bandit_improves() {
        let b = Bandit::new(BanditConfig::default()).unwrap();
        let (end, log) = b.train(200).unwrap();
        let start = b.expected_reward(&b.reference, 4000, 1);
        let finish = b.expected_reward(&end, 4000, 1);
        assert!(finish >= start + 0.3, "{start} -> {finish}");
        let head = log[0].mean_reward;
        let tail: f64 = log[180..].iter().map(|e| e.mean_reward).sum::<f64>() / 20.0;
        assert!(tail >= head + 0.3, "{head} -> {tail}");
        assert_eq!(b.train(5).unwrap(), b.train(5).unwrap());
    }
}
