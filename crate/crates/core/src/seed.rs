//! Seed derivation.
//!
//! Every stochastic component draws from a ChaCha8 stream seeded with
//! `derive_seed(base, &[component, index, ...])`, a SplitMix64 fold of the
//! base seed and the path components. Whole-pipeline runs are therefore
//! reproducible from one configured seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn rng_for(base: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, parts))
}

/// Component tags used as the first path element.
pub mod stream {
    pub const FOLDS: u64 = 1;
    pub const BASELINE: u64 = 2;
    pub const SVM: u64 = 3;
    pub const TRAITS: u64 = 4;
    pub const SYNTH_SHOCK: u64 = 10;
    pub const SYNTH_TRAIT: u64 = 11;
    pub const SYNTH_LAGGED: u64 = 12;
}
