//! Deterministic randomness.
//!
//! Every stochastic operation in the crate draws from a [`RandomSource`],
//! which wraps a fixed counter-based generator (ChaCha with 8 rounds) so
//! that a seed produces bit-identical streams on every platform and run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the generator backing every [`RandomSource`].
pub const ALGORITHM: &str = "chacha8";

/// A seed plus the algorithm identity it drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    /// Fresh generator positioned at the start of this source's stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// A statistically independent source for a sub-task, such as one Monte
    /// Carlo trial. Mixing is splitmix64 over seed and tag, so derived
    /// streams do not overlap for any (seed, tag) pair in practice.
    pub fn derive(&self, tag: u64) -> RandomSource {
        RandomSource {
            seed: splitmix64(self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn same_seed_gives_identical_stream() {
        let a: Vec<u64> = (0..8).map(|_| RandomSource::new(7).rng().next_u64()).collect();
        let b = RandomSource::new(7).rng().next_u64();
        assert!(a.iter().all(|&v| v == b));
    }

    #[test]
    fn derived_sources_differ_from_parent_and_each_other() {
        let root = RandomSource::new(42);
        let a = root.derive(0);
        let b = root.derive(1);
        assert_ne!(a.seed(), b.seed());
        assert_ne!(a.seed(), root.seed());
        assert_eq!(a, root.derive(0));
    }
}
