//! Per-path random streams.
//!
//! Path `i` of an experiment with master seed `s` draws from ChaCha8 keyed
//! by `seed_from_u64(s)` on stream `i`.  Streams are disjoint, so paths can
//! be generated in any order or in parallel and reproduce exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

pub fn path_rng(master_seed: u64, path: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path);
    rng
}
