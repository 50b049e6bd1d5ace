//! Seed handling shared by every randomized component.
//!
//! All randomness comes from [`ChaCha8Rng`]. A master seed is expanded into
//! independent child seeds with the SplitMix64 finalizer, and a single seed
//! can host several disjoint ChaCha streams (see [`stream`]). Nothing here
//! depends on thread scheduling, so parallel and sequential runs draw the
//! same numbers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Increment of the SplitMix64 sequence (2^64 / golden ratio).
pub const SEED_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// ChaCha stream used for community labels.
pub const LABEL_STREAM: u64 = 0;
/// ChaCha stream used for edge draws.
pub const EDGE_STREAM: u64 = 1;
/// ChaCha stream used by decoders for tie-breaking and random starts.
pub const DECODER_STREAM: u64 = 2;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed number `index` of `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(SEED_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// A ChaCha8 generator seeded from `seed` and positioned on stream `stream_id`.
pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fair coin.
pub fn coin(rng: &mut impl RngCore) -> bool {
    rng.next_u64() >> 63 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_disjoint() {
        let mut a = stream(7, LABEL_STREAM);
        let mut b = stream(7, EDGE_STREAM);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
        let mut a2 = stream(7, LABEL_STREAM);
        let xs2: Vec<u64> = (0..8).map(|_| a2.next_u64()).collect();
        assert_eq!(xs, xs2);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = stream(1, 0);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
