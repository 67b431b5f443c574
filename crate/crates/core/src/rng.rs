//! Seeded random streams.
//!
//! Every source of randomness is a ChaCha8 generator keyed by a 64-bit master
//! seed; independent tasks (one tree, one feature subset) select their own
//! ChaCha stream number, so results do not depend on scheduling or thread
//! count and replicate across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream reserved for the train/test split.
pub const SPLIT_STREAM: u64 = 1 << 40;
/// First stream of per-subset generators in the subset study.
pub const SUBSET_STREAM_BASE: u64 = 1 << 41;

pub fn seeded_rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for task `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
