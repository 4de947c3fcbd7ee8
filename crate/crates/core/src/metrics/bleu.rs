//! Sentence-level BLEU: clipped n-gram precisions up to order `n`, uniform
//! geometric mean, brevity penalty. Tokens are lowercase words.

use alloc::collections::BTreeMap;
use alloc::string::String;

use super::error::MetricError;
use crate::text::words;

fn ngrams(toks: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut m = BTreeMap::new();
    if n > 0 && toks.len() >= n {
        for g in toks.windows(n) {
            *m.entry(g).or_insert(0) += 1;
        }
    }
    m
}

/// Clipped order-`n` matches and the candidate's order-`n` count.
pub fn modified_precision(candidate: &[String], reference: &[String], n: usize) -> (usize, usize) {
    let cand = ngrams(candidate, n);
    let refs = ngrams(reference, n);
    let matched = cand
        .iter()
        .map(|(g, c)| (*c).min(refs.get(g).copied().unwrap_or(0)))
        .sum();
    (matched, cand.values().sum())
}

pub fn bleu_n(candidate: &str, reference: &str, n: usize) -> Result<f64, MetricError> {
    if n == 0 {
        return Err(MetricError::Argument("BLEU order must be at least 1".into()));
    }
    let r = words(reference);
    if r.is_empty() {
        return Err(MetricError::Argument("empty BLEU reference".into()));
    }
    let c = words(candidate);
    if c.is_empty() {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for order in 1..=n {
        let (m, total) = modified_precision(&c, &r, order);
        if m == 0 || total == 0 {
            return Ok(0.0);
        }
        log_sum += libm::log(m as f64 / total as f64);
    }
    let bp = if c.len() > r.len() {
        1.0
    } else {
        libm::exp(1.0 - r.len() as f64 / c.len() as f64)
    };
    Ok((bp * libm::exp(log_sum / n as f64)).clamp(0.0, 1.0))
}
