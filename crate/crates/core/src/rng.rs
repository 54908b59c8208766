//! Named, splittable random streams.
//!
//! Every consumer of randomness draws from its own stream, keyed by
//! `(master seed, run id, stream name)`. Changing how many draws one component
//! makes never perturbs the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The generator type used throughout the crate.
pub type StreamRng = ChaCha8Rng;

pub const AGENT_NOISE: &str = "agent-noise";
pub const PRINCIPAL_NOISE: &str = "principal-noise";
pub const AGENT_EXPLORE: &str = "agent-explore";
pub const MC_GEOMETRY: &str = "mc-geometry";
pub const INSTANCE: &str = "instance";

/// Derive the stream `name` for run `run_id` under `master_seed`.
pub fn stream(master_seed: u64, run_id: u64, name: &str) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(run_id.to_le_bytes());
    hasher.update((name.len() as u64).to_le_bytes());
    hasher.update(name.as_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(seed)
}

/// The four streams a single game run consumes.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub agent_noise: StreamRng,
    pub principal_noise: StreamRng,
    pub agent_explore: StreamRng,
    pub mc_geometry: StreamRng,
}

impl RunStreams {
    pub fn new(master_seed: u64, run_id: u64) -> Self {
        Self {
            agent_noise: stream(master_seed, run_id, AGENT_NOISE),
            principal_noise: stream(master_seed, run_id, PRINCIPAL_NOISE),
            agent_explore: stream(master_seed, run_id, AGENT_EXPLORE),
            mc_geometry: stream(master_seed, run_id, MC_GEOMETRY),
        }
    }
}
