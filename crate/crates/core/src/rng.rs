//! Seed derivation and seeded permutations.
//!
//! Every randomized routine takes a 64-bit seed. Sub-tasks (shuffles, trials,
//! grid cells) derive their own seed from `(parent, index)` through a
//! SplitMix64 finalizer, so a task's random stream never depends on the
//! order in which tasks are scheduled.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DetRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for task `index` of a job seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Child seed keyed by a label, for separating streams of different kinds.
pub fn derive_labeled(seed: u64, label: &str, index: u64) -> u64 {
    let tag = label.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    });
    derive_seed(derive_seed(seed, tag), index)
}

pub fn rng(seed: u64) -> DetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random permutation of `0..n` (Fisher-Yates).
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    idx
}

/// `values` reordered by a seeded uniform permutation.
pub fn shuffled(values: &[f64], seed: u64) -> Vec<f64> {
    permutation(values.len(), seed)
        .into_iter()
        .map(|i| values[i])
        .collect()
}
