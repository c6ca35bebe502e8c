//! The single named random generator for the whole laboratory.
//!
//! Every sampling path takes one 64-bit seed and derives all randomness from
//! this generator, so that a report which records `(generator, seed)` can be
//! replayed byte-identically. Substreams are derived by hashing a label into
//! the seed rather than by sharing a generator across loops, so the i-th
//! sample of a sweep does not depend on how many samples preceded it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator name recorded in reports. Bump the version suffix if the
/// derivation scheme ever changes.
pub const GENERATOR: &str = "chacha8/v1";

/// The concrete RNG used everywhere.
pub type Rng = ChaCha8Rng;

/// Root generator for a seed.
pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream for (seed, label, index).
///
/// Uses the SplitMix64 finalizer to mix label and index into the seed; the
/// mixing is fixed forever (it is part of the `chacha8/v1` contract).
pub fn substream(seed: u64, label: &str, index: u64) -> Rng {
    let mut h = seed;
    for &b in label.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    ChaCha8Rng::seed_from_u64(splitmix64(h ^ index))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn substreams_are_stable_and_distinct() {
        let a1 = substream(7, "inst", 0).next_u64();
        let a2 = substream(7, "inst", 0).next_u64();
        assert_eq!(a1, a2, "same (seed, label, index) must replay identically");
        assert_ne!(a1, substream(7, "inst", 1).next_u64());
        assert_ne!(a1, substream(7, "seed", 0).next_u64());
        assert_ne!(a1, substream(8, "inst", 0).next_u64());
    }
}
