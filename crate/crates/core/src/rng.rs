//! Named random streams derived from one master seed, so that changing how
//! much of one stream is consumed never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Weights = 0,
    Noise = 1,
    Clutter = 2,
    Shuffle = 3,
    Detection = 4,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
