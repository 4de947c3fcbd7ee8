use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::text::words;

/// Similarity threshold shared by matching, grounding and rewards.
pub const DEFAULT_TAU: f64 = 0.8;

/// A symmetric similarity in [0, 1] with `score(a, a) == 1`.
pub trait Similarity {
    fn score(&self, a: &str, b: &str) -> f64;
}

/// Cosine over lowercase word-count vectors. Two texts without words are
/// identical; one empty side scores 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenCosine;

fn counts(s: &str) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for w in words(s) {
        *m.entry(w).or_insert(0.0) += 1.0;
    }
    m
}

impl Similarity for TokenCosine {
    fn score(&self, a: &str, b: &str) -> f64 {
        let (ca, cb) = (counts(a), counts(b));
        match (ca.is_empty(), cb.is_empty()) {
            (true, true) => return 1.0,
            (true, false) | (false, true) => return 0.0,
            _ => {}
        }
        let dot: f64 = ca.iter().map(|(w, x)| x * cb.get(w).copied().unwrap_or(0.0)).sum();
        let na: f64 = ca.values().map(|x| x * x).sum();
        let nb: f64 = cb.values().map(|x| x * x).sum();
        (dot / libm::sqrt(na * nb)).clamp(0.0, 1.0)
    }
}

/// Default similarity.
pub fn similarity(a: &str, b: &str) -> f64 {
    TokenCosine.score(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        assert_eq!(similarity("", ""), 1.0);
        assert_eq!(similarity("fitness", ""), 0.0);
        assert_eq!(similarity("Fitness, Travel", "travel fitness"), 1.0);
        assert_eq!(similarity("a", "b"), 0.0);
        // {a:1,b:1} vs {a:1}: 1 / sqrt(2)
        assert!((similarity("a b", "a") - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric_bounded_reflexive(a in "[a-c ]{0,12}", b in "[a-c ]{0,12}") {
            let s = similarity(&a, &b);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!((s - similarity(&b, &a)).abs() < 1e-12);
            prop_assert!((similarity(&a, &a) - 1.0).abs() < 1e-12);
        }
    }
}
