//! Seeded, splittable random streams.
//!
//! Every random quantity is drawn from ChaCha8 seeded with the experiment
//! seed, with the ChaCha stream id set to the task index (ensemble member or
//! trajectory number). Task `i` therefore sees the same numbers whether tasks
//! run sequentially or on a worker pool, and whatever the pool size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::TAU;

pub type TaskRng = ChaCha8Rng;

/// Stream offset for classical trajectories, keeping them disjoint from
/// the streams used for quantum packet centers under the same seed.
pub const CLASSICAL_STREAM_BASE: u64 = 1 << 40;

pub fn task_rng(seed: u64, task: u64) -> TaskRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Uniform angle in `[0, 2π)`.
pub fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * TAU
}
