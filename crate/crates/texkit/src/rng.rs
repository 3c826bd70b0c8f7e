//! Deterministic seed derivation.
//!
//! Every randomized stage draws from a ChaCha stream seeded by mixing the
//! master seed with a stream tag and an index. Parallel workers (k-means
//! restarts, forest trees, CV folds) each derive their own seed up front, so
//! results do not depend on thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tag separating RNG streams used for unrelated purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    KmeansRestart = 1,
    ForestTree = 2,
    Fold = 3,
    Synth = 4,
    SplitKfold = 5,
    SplitHoldout = 6,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes (master, stream, index) into a single sub-seed. Changing any one
/// input changes the output; nearby master seeds give unrelated sub-seeds.
pub fn derived_seed(master: u64, stream: Stream, index: u64) -> u64 {
    let mut h = splitmix(master);
    h = splitmix(h ^ stream as u64);
    h = splitmix(h ^ index);
    h
}

pub fn rng_for(master: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derived_seed(master, stream, index))
}
