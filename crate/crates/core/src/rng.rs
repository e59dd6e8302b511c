//! Counter-based random streams keyed by `(seed, replicate, role)`.
//!
//! The ChaCha key is derived from the seed alone; the 64-bit ChaCha stream id
//! encodes the replicate index and the role, so every replicate of every
//! estimator draws from its own stream no matter which worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct roles never share random numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Germs,
    /// Germ stream for the k-th radius doubling of an adaptive run (k >= 1).
    Retry(u8),
    Assumptions,
    ConeMonteCarlo,
    ConeIntersection,
    Coupling,
    Events,
}

impl Role {
    fn code(self) -> u64 {
        match self {
            Role::Germs => 0,
            Role::Retry(k) => 1 + u64::from(k.min(31)),
            Role::Assumptions => 40,
            Role::ConeMonteCarlo => 41,
            Role::ConeIntersection => 42,
            Role::Coupling => 43,
            Role::Events => 44,
        }
    }
}

const ROLE_BITS: u32 = 6;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, replicate, role)`.
pub fn stream(seed: u64, replicate: u64, role: Role) -> StreamRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((replicate << ROLE_BITS) | role.code());
    rng
}
