//! Seeding and sampling helpers shared by the simulator and the curators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// FNV-1a over the bytes of `s`.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a string key into a derived seed.
pub fn derive_seed(master: u64, key: &str) -> u64 {
    splitmix(master ^ splitmix(fnv1a(key)))
}

/// Independent per-user stream: depends only on `(master, user_id)`.
pub fn user_rng(master: u64, user_id: &str) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, user_id))
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Index drawn proportionally to `weights`. Returns `None` when every weight
/// is zero or the slice is empty.
pub fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
    if !(total > 0.0) {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    let mut last = None;
    for (i, w) in weights.iter().enumerate() {
        if *w <= 0.0 {
            continue;
        }
        last = Some(i);
        if x < *w {
            return Some(i);
        }
        x -= *w;
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_streams_differ_by_user() {
        let mut a = user_rng(7, "u1");
        let mut b = user_rng(7, "u2");
        let mut a2 = user_rng(7, "u1");
        let x: u64 = a.gen();
        assert_ne!(x, b.gen::<u64>());
        assert_eq!(x, a2.gen::<u64>());
    }

    #[test]
    fn weighted_index_skips_zero_weights() {
        let mut rng = seeded(1);
        for _ in 0..1000 {
            let i = weighted_index(&[0.0, 1.0, 0.0, 2.0], &mut rng).unwrap();
            assert!(i == 1 || i == 3);
        }
        assert_eq!(weighted_index(&[0.0, 0.0], &mut rng), None);
        assert_eq!(weighted_index(&[], &mut rng), None);
    }
}
