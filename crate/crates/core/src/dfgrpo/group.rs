//! Rollout groups, group-relative advantages and the two filter tiers.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::config::GrpoConfig;
use super::reward::RewardBreakdown;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub tokens: Vec<u32>,
    pub reward: RewardBreakdown,
}

impl Rollout {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupStatus {
    Active,
    FilteredLow,
    FilteredHigh,
    /// Fewer than two outputs survived sample filtering.
    Unusable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub prompt_id: String,
    /// Prompt index into the policy's start contexts.
    pub prompt: usize,
    pub outputs: Vec<Rollout>,
    /// One per output once the group is active; empty otherwise.
    pub advantages: Vec<f64>,
    pub status: GroupStatus,
}

impl RolloutGroup {
    pub fn new(prompt_id: impl Into<String>, prompt: usize, outputs: Vec<Rollout>) -> Self {
        Self {
            prompt_id: prompt_id.into(),
            prompt,
            outputs,
            advantages: Vec::new(),
            status: GroupStatus::Active,
        }
    }

    pub fn mean_reward(&self) -> f64 {
        if self.outputs.is_empty() {
            return 0.0;
        }
        self.outputs.iter().map(|o| o.reward.total).sum::<f64>() / self.outputs.len() as f64
    }
}

/// (r - mean) / std with the population std. A zero-variance group gets
/// all-zero advantages.
pub fn compute_advantages(rewards: &[f64]) -> Vec<f64> {
    let n = rewards.len() as f64;
    if rewards.len() < 2 {
        return alloc::vec![0.0; rewards.len()];
    }
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    let std = libm::sqrt(var);
    // relative guard so a group of equal large rewards is not amplified noise
    if std <= 1e-12 * (1.0 + libm::fabs(mean)) {
        return alloc::vec![0.0; rewards.len()];
    }
    rewards.iter().map(|r| (r - mean) / std).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCounts {
    pub truncated_samples: usize,
    pub format_failed_samples: usize,
    pub unusable_groups: usize,
    pub filtered_low: usize,
    pub filtered_high: usize,
    pub active_groups: usize,
}

/// Tier 1: drops outputs that hit `max_len` or fail the format reward.
/// Truncation is counted first when both apply. Returns (truncated,
/// format-failed) and marks the group unusable below two survivors.
pub fn filter_samples(group: &mut RolloutGroup, max_len: usize) -> (usize, usize) {
    let (mut truncated, mut format) = (0, 0);
    group.outputs.retain(|o| {
        if o.len() >= max_len {
            truncated += 1;
            false
        } else if o.reward.format == 0 {
            format += 1;
            false
        } else {
            true
        }
    });
    if group.outputs.len() < 2 {
        group.status = GroupStatus::Unusable;
        group.advantages.clear();
    }
    (truncated, format)
}

/// Tier 2: sets each usable group's status by its mean reward and fills in
/// advantages for active groups.
pub fn filter_groups(groups: &mut [RolloutGroup], eps_low: f64, eps_high: f64) {
    for g in groups.iter_mut().filter(|g| g.status != GroupStatus::Unusable) {
        let mean = g.mean_reward();
        g.status = if mean < eps_low {
            GroupStatus::FilteredLow
        } else if mean > eps_high {
            GroupStatus::FilteredHigh
        } else {
            GroupStatus::Active
        };
        g.advantages = if g.status == GroupStatus::Active {
            compute_advantages(&g.outputs.iter().map(|o| o.reward.total).collect::<Vec<_>>())
        } else {
            Vec::new()
        };
    }
}

/// Both tiers, in order, with exclusion accounting.
pub fn dual_filter(groups: &mut [RolloutGroup], cfg: &GrpoConfig) -> FilterCounts {
    let mut c = FilterCounts::default();
    for g in groups.iter_mut() {
        g.status = GroupStatus::Active;
        let (t, f) = filter_samples(g, cfg.max_len);
        c.truncated_samples += t;
        c.format_failed_samples += f;
    }
    filter_groups(groups, cfg.eps_low, cfg.eps_high);
    for g in groups.iter() {
        match g.status {
            GroupStatus::Active => c.active_groups += 1,
            GroupStatus::FilteredLow => c.filtered_low += 1,
            GroupStatus::FilteredHigh => c.filtered_high += 1,
            GroupStatus::Unusable => c.unusable_groups += 1,
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rollout(len: usize, format: u8, r: f64) -> Rollout {
        Rollout {
            tokens: alloc::vec![1; len],
            reward: RewardBreakdown::new(format, r, 0.0),
        }
    }

    #[test]
    fn advantage_examples() {
        assert_eq!(compute_advantages(&[1.0, 0.0, 1.0, 0.0]), [1.0, -1.0, 1.0, -1.0]);
        assert_eq!(compute_advantages(&[3.0, 1.0]), [1.0, -1.0]);
        assert_eq!(compute_advantages(&[0.7; 5]), [0.0; 5]);
    }

    proptest! {
        #[test]
        fn advantages_standardized(rs in prop::collection::vec(0.0f64..2.0, 2..16)) {
            let a = compute_advantages(&rs);
            let n = a.len() as f64;
            let mean = a.iter().sum::<f64>() / n;
            let var = a.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            if a.iter().any(|x| *x != 0.0) {
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((libm::sqrt(var) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tiers() {
        let cfg = GrpoConfig {
            max_len: 5,
            ..Default::default()
        };
        let mut gs = alloc::vec![
            RolloutGroup::new("low", 0, alloc::vec![rollout(3, 1, 0.0), rollout(3, 1, 0.1), rollout(3, 1, 0.05)]),
            RolloutGroup::new("high", 0, alloc::vec![rollout(3, 1, 0.98), rollout(3, 1, 1.0)]),
            RolloutGroup::new(
                "mixed",
                0,
                alloc::vec![rollout(5, 1, 1.0), rollout(3, 0, 0.0), rollout(3, 1, 1.0), rollout(3, 1, 0.0)]
            ),
            RolloutGroup::new("thin", 0, alloc::vec![rollout(6, 1, 1.0), rollout(2, 1, 0.5)]),
        ];
        let c = dual_filter(&mut gs, &cfg);
        assert_eq!(gs[0].status, GroupStatus::FilteredLow);
        assert_eq!(gs[1].status, GroupStatus::FilteredHigh);
        assert_eq!(gs[2].status, GroupStatus::Active);
        assert_eq!(gs[2].outputs.len(), 2);
        assert_eq!(gs[2].advantages, [1.0, -1.0]);
        assert_eq!(gs[3].status, GroupStatus::Unusable);
        assert_eq!(
            c,
            FilterCounts {
                truncated_samples: 2,
                format_failed_samples: 1,
                unusable_groups: 1,
                filtered_low: 1,
                filtered_high: 1,
                active_groups: 1,
            }
        );
    }
}
