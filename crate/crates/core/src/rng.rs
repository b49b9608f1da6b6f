//! Deterministic random streams split from a master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser, used to decorrelate derived seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for task `task` under `seed`; independent of scheduling order.
pub fn stream(seed: u64, task: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(task.wrapping_add(1))))
}

/// Seed derived for a named sub-task, e.g. one instance of a sweep.
pub fn derive(seed: u64, task: u64) -> u64 {
    mix(seed ^ mix(task.wrapping_add(0x5151)))
}
