//! Seeded random streams.
//!
//! Every random quantity in a trial draws from its own ChaCha stream keyed by
//! the trial seed, so adding or resizing one consumer never perturbs another
//! and trials with different seeds can run on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent consumers of randomness within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Payload1 = 1,
    Payload2 = 2,
    CommonPhase = 3,
    Noise1 = 4,
    Noise2 = 5,
}

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Seed of trial `index` derived from a base seed.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    base_seed ^ index
}
