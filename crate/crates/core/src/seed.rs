//! Counter-based sub-seed derivation.
//!
//! Every stochastic stage draws from a generator seeded by hashing the master
//! seed together with a stream tag and the stage's coordinates (way, fold,
//! attempt). Results therefore do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Ways = 1,
    WayFolds = 2,
    OuterFolds = 3,
    Synthetic = 4,
    RandomSelection = 5,
    Folds = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, stream: Stream, coords: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ splitmix64(stream as u64));
    for &c in coords {
        h = splitmix64(h ^ splitmix64(c.wrapping_add(0x5851_F42D_4C95_7F2D)));
    }
    h
}

pub fn rng(master: u64, stream: Stream, coords: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, stream, coords))
}
