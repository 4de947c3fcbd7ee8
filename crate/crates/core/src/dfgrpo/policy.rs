//! A tabular softmax policy small enough to differentiate by hand.
//!
//! The first token is conditioned on the prompt, every later token on the
//! token before it. Parameters are one logit row per context.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::error::GrpoError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyPolicy {
    pub vocab: usize,
    pub prompts: usize,
    /// Row-major `[context][token]`.
    pub logits: Vec<f64>,
}

impl ToyPolicy {
    /// Uniform policy.
    pub fn new(vocab: usize, prompts: usize) -> Self {
        Self {
            vocab,
            prompts,
            logits: alloc::vec![0.0; (prompts + vocab) * vocab],
        }
    }

    pub fn from_logits(vocab: usize, prompts: usize, logits: Vec<f64>) -> Result<Self, GrpoError> {
        if vocab == 0 || logits.len() != (prompts + vocab) * vocab {
            return Err(GrpoError::Policy(alloc::format!(
                "{} logits do not fit {} contexts x {vocab} tokens",
                logits.len(),
                prompts + vocab
            )));
        }
        Ok(Self { vocab, prompts, logits })
    }

    pub fn contexts(&self) -> usize {
        self.prompts + self.vocab
    }

    /// Context of position `t` of `tokens` under `prompt`.
    pub fn context(&self, prompt: usize, tokens: &[u32], t: usize) -> usize {
        if t == 0 {
            prompt
        } else {
            self.prompts + tokens[t - 1] as usize
        }
    }

    pub fn row(&self, ctx: usize) -> &[f64] {
        &self.logits[ctx * self.vocab..(ctx + 1) * self.vocab]
    }

    pub fn row_mut(&mut self, ctx: usize) -> &mut [f64] {
        let v = self.vocab;
        &mut self.logits[ctx * v..(ctx + 1) * v]
    }

    pub fn log_probs(&self, ctx: usize) -> Vec<f64> {
        let row = self.row(ctx);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + libm::log(row.iter().map(|x| libm::exp(x - max)).sum::<f64>());
        row.iter().map(|x| x - lse).collect()
    }

    pub fn probs(&self, ctx: usize) -> Vec<f64> {
        self.log_probs(ctx).into_iter().map(libm::exp).collect()
    }

    pub fn check_tokens(&self, prompt: usize, tokens: &[u32]) -> Result<(), GrpoError> {
        if prompt >= self.prompts || tokens.iter().any(|t| *t as usize >= self.vocab) {
            return Err(GrpoError::Policy(alloc::format!("prompt {prompt} or tokens {tokens:?} out of range")));
        }
        Ok(())
    }

    pub fn seq_log_prob(&self, prompt: usize, tokens: &[u32]) -> f64 {
        (0..tokens.len())
            .map(|t| self.log_probs(self.context(prompt, tokens, t))[tokens[t] as usize])
            .sum()
    }

    /// KL(self || other) at one context, exact over the vocabulary.
    pub fn kl_at(&self, other: &Self, ctx: usize) -> f64 {
        let (lp, lq) = (self.log_probs(ctx), other.log_probs(ctx));
        let kl: f64 = lp.iter().zip(&lq).map(|(p, q)| libm::exp(*p) * (p - q)).sum();
        kl.max(0.0)
    }

    /// Samples until `eos` or `max_len` tokens.
    pub fn sample<R: Rng + ?Sized>(&self, prompt: usize, eos: u32, max_len: usize, rng: &mut R) -> Vec<u32> {
        let mut toks = Vec::new();
        while toks.len() < max_len {
            let ctx = self.context(prompt, &toks, toks.len());
            let p = self.probs(ctx);
            let tok = crate::rng::weighted_index(&p, rng).unwrap_or(0) as u32;
            toks.push(tok);
            if tok == eos {
                break;
            }
        }
        toks
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn rows_normalize_and_kl_is_sound() {
        let mut rng = seeded(4);
        let p = ToyPolicy::from_logits(3, 2, (0..15).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        let q = ToyPolicy::from_logits(3, 2, (0..15).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        for c in 0..p.contexts() {
            assert!((p.probs(c).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.kl_at(&q, c) > 0.0);
            assert_eq!(p.kl_at(&p, c), 0.0);
        }
        // shifting a row by a constant leaves the distribution alone
        let mut shifted = p.clone();
        shifted.row_mut(1).iter_mut().for_each(|x| *x += 5.0);
        assert!(p.kl_at(&shifted, 1) < 1e-12);
    }

    #[test]
    fn sequence_probability_factorizes() {
        let p = ToyPolicy::from_logits(2, 1, alloc::vec![0.0, 1.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
        let l = p.seq_log_prob(0, &[1, 0]);
        let want = libm::log(libm::exp(1.0) / (1.0 + libm::exp(1.0))) + libm::log(libm::exp(0.0) / 2.0);
        assert!((l - want).abs() < 1e-12);
        let s = p.sample(0, 0, 4, &mut seeded(1));
        assert!(s.len() <= 4);
        assert!(ToyPolicy::from_logits(2, 1, alloc::vec![0.0; 5]).is_err());
    }
}
