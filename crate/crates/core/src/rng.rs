//! Counter-based random streams.
//!
//! Every independent work item (a trajectory, a Markov chain, a Monte-Carlo
//! draw batch) gets its own ChaCha stream selected by `(seed, stream_id)`, so
//! results never depend on how rayon schedules the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Random stream number `stream` under the global `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
