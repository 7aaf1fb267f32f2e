//! Seed derivation and the keyed generators behind every random draw.
//!
//! All randomness flows from one 64-bit seed. Sub-seeds are derived as the
//! first eight bytes of `SHA-256(seed_le || purpose || index_le)`; each
//! consumer then runs a ChaCha8 stream keyed by its sub-seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type ProtocolRng = ChaCha8Rng;

pub fn derive_seed(seed: u64, purpose: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(purpose.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn rng_from_seed(seed: u64) -> ProtocolRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `stream` of the generator keyed by `seed`.
pub fn keyed_stream(seed: u64, stream: u64) -> ProtocolRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The `index`-th uniform draw in `[0, 1)` of `keyed_stream(seed, stream)`,
/// computed without generating the preceding draws.
pub fn keyed_uniform(seed: u64, stream: u64, index: u64) -> f64 {
    let mut rng = keyed_stream(seed, stream);
    rng.set_word_pos(2 * index as u128);
    rng.random::<f64>()
}

/// Per-party seeds for one protocol execution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSeeds {
    pub channel: u64,
    pub alice: u64,
    pub bob: u64,
    pub cathy: u64,
}

impl RunSeeds {
    pub fn derive(seed: u64) -> Self {
        Self {
            channel: derive_seed(seed, "channel", 0),
            alice: derive_seed(seed, "alice", 0),
            bob: derive_seed(seed, "bob", 0),
            cathy: derive_seed(seed, "cathy", 0),
        }
    }
}

/// Uniformly random `k` elements of `pool` in draw order (partial
/// Fisher-Yates). Every ordered `k`-tuple of distinct elements is equally
/// likely, so consecutive chunks of the result are uniform disjoint subsets.
pub fn sample_ordered<R: Rng + ?Sized>(pool: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    assert!(k <= pool.len(), "cannot draw {k} of {}", pool.len());
    let mut work = pool.to_vec();
    for i in 0..k {
        let j = rng.random_range(i..work.len());
        work.swap(i, j);
    }
    work.truncate(k);
    work
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_separates_purposes() {
        let a = derive_seed(7, "channel", 0);
        assert_eq!(a, derive_seed(7, "channel", 0));
        assert_ne!(a, derive_seed(7, "bob", 0));
        assert_ne!(a, derive_seed(7, "channel", 1));
        assert_ne!(a, derive_seed(8, "channel", 0));
    }

    #[test]
    fn positioned_draw_matches_sequential_stream() {
        let mut rng = keyed_stream(42, 1);
        for i in 0..50 {
            let sequential: f64 = rng.random();
            assert_eq!(sequential, keyed_uniform(42, 1, i));
        }
        assert_ne!(keyed_uniform(42, 1, 3), keyed_uniform(42, 2, 3));
    }

    #[test]
    fn ordered_sample_is_uniform_over_pairs() {
        let pool = [10, 20, 30];
        let mut rng = rng_from_seed(1);
        let mut counts = std::collections::HashMap::new();
        let trials = 60_000;
        for _ in 0..trials {
            *counts.entry(sample_ordered(&pool, 2, &mut rng)).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            let freq = *c as f64 / trials as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "{freq}");
        }
    }
}
