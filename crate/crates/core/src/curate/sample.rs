use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::error::CurateError;
use super::question::Question;
use crate::sim::population::largest_remainder;

/// A target share for one stratum key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumShare {
    pub key: String,
    pub share: f64,
}

/// Draws `n` questions with per-stratum counts set by largest-remainder
/// rounding of the shares. `key` assigns each question its stratum. Output
/// is grouped by stratum in spec order, pool order within each.
pub fn stratified_sample<R: Rng + ?Sized>(
    pool: &[Question],
    strata: &[StratumShare],
    key: impl Fn(&Question) -> String,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Question>, CurateError> {
    if strata.is_empty() {
        return Err(CurateError::Sampling("no strata given".into()));
    }
    let total: f64 = strata.iter().map(|s| s.share).sum();
    if strata.iter().any(|s| !(s.share >= 0.0)) || !(total > 0.0) {
        return Err(CurateError::Sampling("shares must be nonnegative with a positive sum".into()));
    }
    let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, q) in pool.iter().enumerate() {
        members.entry(key(q)).or_default().push(i);
    }
    let shares: Vec<f64> = strata.iter().map(|s| s.share / total).collect();
    let quotas = largest_remainder(&shares, n);
    let mut out = Vec::with_capacity(n);
    for (s, quota) in strata.iter().zip(quotas) {
        let have = members.get(&s.key).map_or(&[][..], |v| v.as_slice());
        if have.is_empty() && s.share > 0.0 {
            return Err(CurateError::Sampling(alloc::format!("stratum {:?} is empty", s.key)));
        }
        if have.len() < quota {
            return Err(CurateError::Sampling(alloc::format!(
                "stratum {:?} has {} questions, needs {quota}",
                s.key,
                have.len()
            )));
        }
        let mut picked: Vec<usize> = sample(rng, have.len(), quota).into_iter().map(|j| have[j]).collect();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|i| pool[i].clone()));
    }
    Ok(out)
}
