//! Seed derivation.
//!
//! Per-realization seeds are derived as `splitmix64(seed ^ splitmix64(index + 1))`
//! so that neighbouring indices give unrelated streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` derived from a base seed.
pub fn derive(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive(1, 0), derive(2, 0));
    }
}
