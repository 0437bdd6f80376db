//! Seeded randomness. Every random choice in the crate derives from an
//! explicit 64-bit seed through ChaCha8, a counter-based generator whose
//! independent streams give per-block randomness without shared state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `stream` of the generator keyed by `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
