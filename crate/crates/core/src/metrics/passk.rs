//! Avg@k and Pass@k over repeated inference trials.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::error::MetricError;

/// Outcomes of `n` independent trials on one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub item_id: String,
    pub outcomes: Vec<bool>,
}

impl TrialRecord {
    pub fn new(item_id: impl Into<String>, outcomes: Vec<bool>) -> Self {
        Self {
            item_id: item_id.into(),
            outcomes,
        }
    }

    pub fn n(&self) -> usize {
        self.outcomes.len()
    }

    pub fn c(&self) -> usize {
        self.outcomes.iter().filter(|o| **o).count()
    }
}

/// Mean over items of the correct fraction among the first `k` trials.
/// With `k = n` this is plain accuracy.
pub fn avg_at_k(records: &[TrialRecord], k: usize) -> Result<f64, MetricError> {
    if records.is_empty() {
        return Err(MetricError::Undefined("avg@k over no items".into()));
    }
    if k == 0 {
        return Err(MetricError::Argument("k must be at least 1".into()));
    }
    let mut sum = 0.0;
    for r in records {
        if k > r.n() {
            return Err(MetricError::Argument(alloc::format!(
                "{}: k = {k} exceeds n = {}",
                r.item_id,
                r.n()
            )));
        }
        sum += r.outcomes[..k].iter().filter(|o| **o).count() as f64 / k as f64;
    }
    Ok(sum / records.len() as f64)
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Probability that a uniformly random `k`-subset of `n` trials, `c` of them
/// correct, holds at least one correct trial: `1 - C(n-c, k) / C(n, k)`.
///
/// Small `n` is computed from exact binomials; large `n` falls back to the
/// product form `1 - prod_{i=n-c+1}^{n} (1 - k/i)`, which never overflows.
pub fn pass_at_k(n: usize, c: usize, k: usize) -> Result<f64, MetricError> {
    if c > n || k == 0 || k > n {
        return Err(MetricError::Argument(alloc::format!(
            "pass@k needs 0 <= c <= n and 1 <= k <= n, got n={n} c={c} k={k}"
        )));
    }
    if n - c < k {
        return Ok(1.0);
    }
    if let (Some(total), Some(miss)) = (binomial(n, k), binomial(n - c, k)) {
        return Ok((total - miss) as f64 / total as f64);
    }
    let mut keep = 1.0;
    for i in (n - c + 1)..=n {
        keep *= 1.0 - k as f64 / i as f64;
    }
    Ok(1.0 - keep)
}

/// Mean Pass@k over items, each with its own `n` and `c`.
pub fn mean_pass_at_k(records: &[TrialRecord], k: usize) -> Result<f64, MetricError> {
    if records.is_empty() {
        return Err(MetricError::Undefined("pass@k over no items".into()));
    }
    let mut sum = 0.0;
    for r in records {
        sum += pass_at_k(r.n(), r.c(), k)?;
    }
    Ok(sum / records.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::seq::index::sample;

    fn hits_by_enumeration(n: usize, c: usize, k: usize) -> (u64, u64) {
        // trials 0..c are the correct ones
        let (mut hits, mut total) = (0, 0);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            total += 1;
            if mask & ((1 << c) - 1) != 0 {
                hits += 1;
            }
        }
        (hits, total)
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        for n in 1..=12 {
            for c in 0..=n {
                for k in 1..=n {
                    let (hits, total) = hits_by_enumeration(n, c, k);
                    assert_eq!(pass_at_k(n, c, k).unwrap(), hits as f64 / total as f64, "n={n} c={c} k={k}");
                }
            }
        }
    }

    #[test]
    fn worked_values() {
        assert_eq!(pass_at_k(10, 10, 1).unwrap(), 1.0);
        assert_eq!(pass_at_k(10, 0, 5).unwrap(), 0.0);
        assert!((pass_at_k(10, 3, 5).unwrap() - (1.0 - 21.0 / 252.0)).abs() < 1e-15);
        for bad in [(5, 6, 1), (5, 2, 0), (5, 2, 6)] {
            assert!(pass_at_k(bad.0, bad.1, bad.2).is_err());
        }
    }

    #[test]
    fn product_fallback_agrees() {
        // n large enough that C(n, k) overflows u128
        let n = 400;
        assert!(binomial(n, 200).is_none());
        for c in [1, 3, 50] {
            let k = 200;
            let mut keep = 1.0;
            for i in 0..k {
                keep *= (n - c - i) as f64 / (n - i) as f64;
            }
            assert!((pass_at_k(n, c, k).unwrap() - (1.0 - keep)).abs() < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_within_three_sigma() {
        let mut rng = seeded(17);
        let draws = 100_000;
        for c in [1, 3, 6] {
            for k in [1, 4, 7] {
                let p = pass_at_k(10, c, k).unwrap();
                let hits = (0..draws)
                    .filter(|_| sample(&mut rng, 10, k).iter().any(|i| i < c))
                    .count();
                let est = hits as f64 / draws as f64;
                let sigma = libm::sqrt(p * (1.0 - p) / draws as f64);
                assert!((est - p).abs() <= 3.0 * sigma + 1e-12, "c={c} k={k} p={p} est={est}");
            }
        }
    }

    #[test]
    fn avg_cases() {
        let all = [TrialRecord::new("a", alloc::vec![true; 4])];
        assert_eq!(avg_at_k(&all, 4).unwrap(), 1.0);
        let half = [TrialRecord::new("a", (0..10).map(|i| i % 2 == 0).collect())];
        assert_eq!(avg_at_k(&half, 10).unwrap(), 0.5);
        assert!(avg_at_k(&[], 1).is_err());
        assert!(avg_at_k(&half, 11).is_err());
        assert!(avg_at_k(&half, 0).is_err());
    }

    proptest! {
        #[test]
        fn avg_matches_summation(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 5), 1..20)) {
            let recs: Vec<TrialRecord> = rows.iter().enumerate()
                .map(|(i, o)| TrialRecord::new(alloc::format!("q{i}"), o.clone()))
                .collect();
            let mut total = 0.0;
            for r in &rows {
                let mut c = 0.0;
                for o in r { if *o { c += 1.0; } }
                total += c / 5.0;
            }
            prop_assert!((avg_at_k(&recs, 5).unwrap() - total / rows.len() as f64).abs() < 1e-12);
        }

        #[test]
        fn avg_of_identical_outcomes(o in any::<bool>(), n in 1usize..8) {
            let recs = [TrialRecord::new("x", alloc::vec![o; n])];
            prop_assert_eq!(avg_at_k(&recs, n).unwrap(), if o { 1.0 } else { 0.0 });
        }

        #[test]
        fn monotone_in_k_and_c(n in 1usize..40, c in 0usize..40, k in 1usize..40) {
            let c = c.min(n);
            let k = k.min(n);
            let p = pass_at_k(n, c, k).unwrap();
            if k < n { prop_assert!(pass_at_k(n, c, k + 1).unwrap() >= p); }
            if c < n { prop_assert!(pass_at_k(n, c + 1, k).unwrap() >= p); }
            prop_assert_eq!(pass_at_k(n, c, n).unwrap() == 1.0, c >= 1);
        }
    }
}
