use alloc::string::ToString;

use serde::{Deserialize, Serialize};

use super::error::GrpoError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrpoConfig {
    pub epsilon_clip: f64,
    pub beta_kl: f64,
    /// Groups whose mean reward is below this are dropped.
    pub eps_low: f64,
    /// Groups whose mean reward is above this are dropped.
    pub eps_high: f64,
    /// Outputs this long count as truncated.
    pub max_len: usize,
    pub group_size: usize,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        Self {
            epsilon_clip: 0.2,
            beta_kl: 0.01,
            eps_low: 0.1,
            eps_high: 0.95,
            max_len: 6,
            group_size: 8,
        }
    }
}

impl GrpoConfig {
    pub fn validate(&self) -> Result<(), GrpoError> {
        let bad = |m: &str| Err(GrpoError::Config(m.to_string()));
        if !(self.epsilon_clip > 0.0) {
            return bad("epsilon_clip must be positive");
        }
        if !(self.beta_kl >= 0.0) {
            return bad("beta_kl must be nonnegative");
        }
        if !(self.eps_low < self.eps_high) {
            return bad("eps_low must be below eps_high");
        }
        if self.max_len == 0 {
            return bad("max_len must be positive");
        }
        if self.group_size < 2 {
            return bad("group_size must be at least 2");
        }
        Ok(())
    }
}
