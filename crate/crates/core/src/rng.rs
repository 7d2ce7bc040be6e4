//! Named, reproducible random streams.
//!
//! Every stochastic process in a run (mobility, each link's channel, AoA noise,
//! policy sampling, minibatch shuffling) draws from its own ChaCha stream derived
//! from `(seed, domain, index)`. Streams never share state, so adding draws to one
//! process cannot perturb another, and a run can be resumed from nothing more than
//! its seed and episode counter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream domains. Values are part of the reproducibility contract; do not renumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Mobility = 1,
    Link = 2,
    Aoa = 3,
    UavStart = 4,
    Policy = 5,
    Shuffle = 6,
    Init = 7,
    Bench = 8,
}

/// SplitMix64 finalizer, used to spread structured seeds over the key space.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and an index (episode number, eval slot, ...).
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Open the stream `(domain, index)` of the world seeded by `seed`.
pub fn stream(seed: u64, domain: Stream, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 48) ^ index);
    rng
}
