//! Seeded random streams. Every stochastic routine in the crate takes either
//! an explicit seed or a generator derived from one here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `seed`. Streams for different indices
/// never overlap, so restart `i` sees the same numbers no matter how many
/// other restarts run.
pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
