//! Deterministic seed derivation for sub-runs (per class count, per restart,
//! per experiment cell) so that nested randomized procedures stay
//! reproducible and independent.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with two tags into a new independent seed.
pub fn derive_seed(base: u64, tag_a: u64, tag_b: u64) -> u64 {
    splitmix64(splitmix64(base ^ tag_a.wrapping_mul(0xA24BAED4963EE407)) ^ tag_b)
}
