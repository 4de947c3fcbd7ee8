//! DF-GRPO: rewards, group-relative advantages, sample- and group-level
//! filtering, the clipped objective with a KL anchor, and a toy tabular
//! policy to optimize it on.

pub mod config;
pub mod error;
pub mod group;
pub mod objective;
pub mod policy;
pub mod reward;
pub mod train;

pub use config::GrpoConfig;
pub use error::GrpoError;
pub use group::{
    compute_advantages, dual_filter, filter_groups, filter_samples, FilterCounts, GroupStatus, Rollout, RolloutGroup,
};
pub use objective::{clipped_surrogate, finite_difference_grad, grpo_objective, relative_error, Objective};
pub use policy::ToyPolicy;
pub use reward::{
    reward_atomic, reward_format, reward_summary, score_output, JudgeScores, RewardBreakdown, RubricJudge,
    SummaryJudge, SummaryWeights,
};
pub use train::{filtered_step, train_step, Bandit, BanditConfig, TrainLogEntry};
