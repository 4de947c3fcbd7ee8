//! The clipped group-relative objective with an exact KL anchor, and its
//! gradient with respect to the toy policy's logits.
//!
//! For each active group g with surviving outputs o_1..o_G:
//!
//! ```text
//! J = mean_g  mean_i  [ min(r_i A_i, clip(r_i, 1-eps, 1+eps) A_i)
//!                       - beta * mean_t KL(pi(.|c_it) || ref(.|c_it)) ]
//! r_i = pi(o_i|q) / old(o_i|q)
//! ```
//!
//! The ratio is taken over the whole sequence and shared by every token of
//! o_i, so the per-token sum collapses to one surrogate term per output
//! plus the length-averaged KL along the output's own contexts.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::config::GrpoConfig;
use super::error::GrpoError;
use super::group::{GroupStatus, RolloutGroup};
use super::policy::ToyPolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Outputs that entered the objective.
    pub terms: usize,
}

impl Objective {
    pub fn grad_norm(&self) -> f64 {
        libm::sqrt(self.grad.iter().map(|g| g * g).sum())
    }
}

/// min(r A, clip(r) A), and whether the gradient flows through r.
pub fn clipped_surrogate(ratio: f64, adv: f64, eps: f64) -> (f64, bool) {
    let unclipped = ratio * adv;
    let clipped = ratio.clamp(1.0 - eps, 1.0 + eps) * adv;
    if unclipped <= clipped {
        (unclipped, true)
    } else {
        (clipped, false)
    }
}

fn active(groups: &[RolloutGroup]) -> impl Iterator<Item = &RolloutGroup> {
    groups
        .iter()
        .filter(|g| g.status == GroupStatus::Active && !g.outputs.is_empty())
}

/// Objective value and analytic gradient. Groups other than active ones
/// contribute nothing; no active groups gives 0 with a zero gradient.
pub fn grpo_objective(
    policy: &ToyPolicy,
    old: &ToyPolicy,
    reference: &ToyPolicy,
    groups: &[RolloutGroup],
    cfg: &GrpoConfig,
) -> Result<Objective, GrpoError> {
    if policy.logits.len() != old.logits.len() || policy.logits.len() != reference.logits.len() {
        return Err(GrpoError::Policy("policy, old and reference shapes differ".into()));
    }
    let v = policy.vocab;
    let mut grad = alloc::vec![0.0; policy.logits.len()];
    let n_groups = active(groups).count();
    if n_groups == 0 {
        return Ok(Objective { value: 0.0, grad, terms: 0 });
    }
    // per-context KL pieces are shared by many tokens; compute once
    let ctxs = policy.contexts();
    let mut kl = alloc::vec![0.0; ctxs];
    let mut kl_grad: Vec<Vec<f64>> = Vec::with_capacity(ctxs);
    for c in 0..ctxs {
        let lp = policy.log_probs(c);
        let lq = reference.log_probs(c);
        let k: f64 = lp.iter().zip(&lq).map(|(p, q)| libm::exp(*p) * (p - q)).sum();
        kl[c] = k;
        kl_grad.push(lp.iter().zip(&lq).map(|(p, q)| libm::exp(*p) * (p - q - k)).collect());
    }
    let mut value = 0.0;
    let mut terms = 0;
    for g in active(groups) {
        if g.advantages.len() != g.outputs.len() {
            return Err(GrpoError::Policy(alloc::format!("group {}: advantages missing", g.prompt_id)));
        }
        let w_group = 1.0 / (n_groups as f64 * g.outputs.len() as f64);
        for (i, (o, adv)) in g.outputs.iter().zip(&g.advantages).enumerate() {
            policy.check_tokens(g.prompt, &o.tokens)?;
            if o.tokens.is_empty() {
                return Err(GrpoError::Policy(alloc::format!("group {}: output {i} is empty", g.prompt_id)));
            }
            let ratio = libm::exp(policy.seq_log_prob(g.prompt, &o.tokens) - old.seq_log_prob(g.prompt, &o.tokens));
            if !ratio.is_finite() {
                return Err(GrpoError::NonFiniteRatio {
                    group: g.prompt_id.clone(),
                    output: i,
                });
            }
            let (s, flows) = clipped_surrogate(ratio, *adv, cfg.epsilon_clip);
            let len = o.tokens.len() as f64;
            let mut kl_mean = 0.0;
            for t in 0..o.tokens.len() {
                let c = policy.context(g.prompt, &o.tokens, t);
                kl_mean += kl[c] / len;
                let row = &mut grad[c * v..(c + 1) * v];
                // d log pi(tok|c) / d logits[c] = onehot(tok) - p(.|c)
                if flows && *adv != 0.0 {
                    let p = policy.probs(c);
                    let scale = w_group * adv * ratio;
                    for (u, pu) in p.iter().enumerate() {
                        row[u] -= scale * pu;
                    }
                    row[o.tokens[t] as usize] += scale;
                }
                if cfg.beta_kl != 0.0 {
                    for (u, d) in kl_grad[c].iter().enumerate() {
                        row[u] -= w_group * cfg.beta_kl * d / len;
                    }
                }
            }
            value += w_group * (s - cfg.beta_kl * kl_mean);
            terms += 1;
        }
    }
    Ok(Objective { value, grad, terms })
}

/// Central finite-difference gradient of the objective value.
pub fn finite_difference_grad(
    policy: &ToyPolicy,
    old: &ToyPolicy,
    reference: &ToyPolicy,
    groups: &[RolloutGroup],
    cfg: &GrpoConfig,
    h: f64,
) -> Result<Vec<f64>, GrpoError> {
    let mut p = policy.clone();
    let mut out = Vec::with_capacity(p.logits.len());
    for j in 0..p.logits.len() {
        let x = p.logits[j];
        p.logits[j] = x + h;
        let up = grpo_objective(&p, old, reference, groups, cfg)?.value;
        p.logits[j] = x - h;
        let down = grpo_objective(&p, old, reference, groups, cfg)?.value;
        p.logits[j] = x;
        out.push((up - down) / (2.0 * h));
    }
    Ok(out)
}

/// ||a - b|| / max(||a||, ||b||), or 0 when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |x: &[f64]| libm::sqrt(x.iter().map(|v| v * v).sum());
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale < 1e-300 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfgrpo::group::{compute_advantages, Rollout};
    use crate::dfgrpo::reward::RewardBreakdown;
    use crate::rng::seeded;
    use rand::Rng;

    fn group(prompt: usize, outs: &[(&[u32], f64)]) -> RolloutGroup {
        let mut g = RolloutGroup::new(alloc::format!("p{prompt}"), prompt, Vec::new());
        for (t, r) in outs {
            g.outputs.push(Rollout {
                tokens: t.to_vec(),
                reward: RewardBreakdown::new(1, *r, 0.0),
            });
        }
        g.advantages = compute_advantages(&outs.iter().map(|o| o.1).collect::<Vec<_>>());
        g
    }

    fn random_policy(rng: &mut crate::rng::SimRng, v: usize, p: usize, spread: f64) -> ToyPolicy {
        ToyPolicy::from_logits(v, p, (0..(v + p) * v).map(|_| rng.gen_range(-spread..spread)).collect()).unwrap()
    }

    #[test]
    fn identical_policies_give_zero() {
        let mut rng = seeded(9);
        let p = random_policy(&mut rng, 3, 2, 2.0);
        let gs = [group(0, &[(&[1, 2], 1.0), (&[0], 0.0), (&[2, 2, 1], 0.5)]), group(1, &[(&[1], 0.3), (&[2, 0], 0.9)])];
        let o = grpo_objective(&p, &p, &p, &gs, &GrpoConfig::default()).unwrap();
        assert!(o.value.abs() < 1e-12);
        assert_eq!(o.terms, 5);
    }

    #[test]
    fn hand_evaluated_two_token_case() {
        // vocab {0, 1}, one prompt, outputs [1] and [0] with rewards 1, 0
        let pol = ToyPolicy::from_logits(2, 1, alloc::vec![0.0, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let old = ToyPolicy::new(2, 1);
        let reference = ToyPolicy::from_logits(2, 1, alloc::vec![0.2, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let cfg = GrpoConfig {
            epsilon_clip: 0.2,
            beta_kl: 0.1,
            ..Default::default()
        };
        let gs = [group(0, &[(&[1], 1.0), (&[0], 0.0)])];
        let o = grpo_objective(&pol, &old, &reference, &gs, &cfg).unwrap();

        let p1 = libm::exp(0.5) / (1.0 + libm::exp(0.5));
        let (r1, r0) = (p1 / 0.5, (1.0 - p1) / 0.5);
        // A = [1, -1]; r1 = 1.245 clips to 1.2; r0 = 0.755 is below 0.8, so
        // min(0.755 * -1, 0.8 * -1) = -0.8
        let s1 = f64::min(r1 * 1.0, 1.2);
        let s0 = f64::min(-r0, -0.8);
        let q1 = 1.0 / (1.0 + libm::exp(0.2));
        let kl = p1 * libm::log(p1 / q1) + (1.0 - p1) * libm::log((1.0 - p1) / (1.0 - q1));
        let want = 0.5 * (s1 - 0.1 * kl) + 0.5 * (s0 - 0.1 * kl);
        assert!((o.value - want).abs() < 1e-12, "{} vs {want}", o.value);
    }

    #[test]
    fn beta_zero_inside_clip_is_plain_surrogate() {
        let mut rng = seeded(2);
        let old = random_policy(&mut rng, 3, 1, 1.0);
        let mut pol = old.clone();
        pol.logits.iter_mut().for_each(|x| *x += rng.gen_range(-0.01..0.01));
        let cfg = GrpoConfig {
            beta_kl: 0.0,
            ..Default::default()
        };
        let gs = [group(0, &[(&[1, 2], 1.0), (&[0], 0.0), (&[2], 0.2)])];
        let o = grpo_objective(&pol, &old, &old, &gs, &cfg).unwrap();
        let g = &gs[0];
        let mut want = 0.0;
        for (out, a) in g.outputs.iter().zip(&g.advantages) {
            let r = libm::exp(pol.seq_log_prob(0, &out.tokens) - old.seq_log_prob(0, &out.tokens));
            want += r * a / 3.0;
        }
        assert!((o.value - want).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seeded(31);
        for _ in 0..10 {
            let (v, p) = (4, 2);
            let pol = random_policy(&mut rng, v, p, 1.5);
            let old = random_policy(&mut rng, v, p, 1.5);
            let reference = random_policy(&mut rng, v, p, 1.5);
            let gs: Vec<RolloutGroup> = (0..p)
                .map(|pi| {
                    let outs: Vec<(Vec<u32>, f64)> = (0..4)
                        .map(|_| {
                            let len = rng.gen_range(1..5);
                            ((0..len).map(|_| rng.gen_range(0..v as u32)).collect(), rng.gen_range(0.0..1.0))
                        })
                        .collect();
                    let view: Vec<(&[u32], f64)> = outs.iter().map(|(t, r)| (t.as_slice(), *r)).collect();
                    group(pi, &view)
                })
                .collect();
            let cfg = GrpoConfig {
                beta_kl: 0.05,
                ..Default::default()
            };
            let o = grpo_objective(&pol, &old, &reference, &gs, &cfg).unwrap();
            let fd = finite_difference_grad(&pol, &old, &reference, &gs, &cfg, 1e-6).unwrap();
            assert!(relative_error(&o.grad, &fd) < 1e-4);
        }
    }

    #[test]
    fn surrogate_upper_bound_and_kl_penalty() {
        for r in [0.1, 0.9, 1.0, 1.1, 3.0] {
            for a in [-2.0, -0.5, 0.0, 0.5, 2.0] {
                let (s, _) = clipped_surrogate(r, a, 0.2);
                assert!(s <= libm::fabs(a) * 1.2 + 1e-15);
            }
        }
        let mut rng = seeded(5);
        let pol = random_policy(&mut rng, 3, 1, 1.0);
        let reference = random_policy(&mut rng, 3, 1, 1.0);
        let gs = [group(0, &[(&[1, 2], 1.0), (&[0], 0.0)])];
        let at = |beta: f64| {
            let cfg = GrpoConfig { beta_kl: beta, ..Default::default() };
            grpo_objective(&pol, &pol, &reference, &gs, &cfg).unwrap().value
        };
        assert!(at(0.1) < at(0.01));
        assert!(at(0.01) < at(0.0));
    }

    #[test]
    fn inactive_groups_are_ignored() {
        let mut rng = seeded(8);
        let pol = random_policy(&mut rng, 3, 2, 1.0);
        let old = random_policy(&mut rng, 3, 2, 1.0);
        let live = group(0, &[(&[1, 2], 1.0), (&[0], 0.0)]);
        let mut dead = group(1, &[(&[2], 1.0), (&[1], 0.0)]);
        dead.status = GroupStatus::FilteredHigh;
        let cfg = GrpoConfig::default();
        let both = grpo_objective(&pol, &old, &old, &[live.clone(), dead], &cfg).unwrap();
        let one = grpo_objective(&pol, &old, &old, &[live], &cfg).unwrap();
        assert_eq!(both, one);
    }
}
