//! Seeded random streams.
//!
//! Every stage of the pipeline draws from its own ChaCha8 stream derived from
//! one global seed, so a run is reproducible bit-for-bit and stages do not
//! perturb each other when one of them changes how many numbers it consumes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Named sub-streams of the global seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    SimulateDaily,
    SimulateIntraday,
    SvFit,
    GarchFit,
}

impl Stage {
    fn stream_id(self) -> u64 {
        match self {
            Stage::SimulateDaily => 1,
            Stage::SimulateIntraday => 2,
            Stage::SvFit => 3,
            Stage::GarchFit => 4,
        }
    }
}

/// Generator for `stage` under `seed`.
pub fn stream(seed: u64, stage: Stage) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage.stream_id());
    rng
}

/// Generator for an indexed sub-unit (e.g. one simulated day) of a stage.
pub fn substream(seed: u64, stage: Stage, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stage.stream_id() | (1 << 32));
    rng
}
