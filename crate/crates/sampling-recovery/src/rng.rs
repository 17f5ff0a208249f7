//! Seeded, splittable random streams.
//!
//! Every random quantity in this crate is drawn from a [`Stream`] identified
//! by a pair `(master_seed, stream_id)` of 64-bit unsigned integers. The
//! derivation rule is part of the stable file contract (reports store both
//! values) and is fixed as:
//!
//! 1. the master seed is expanded into a 32-byte ChaCha key by four rounds of
//!    SplitMix64 (constants below), least-significant byte first;
//! 2. the stream id selects the 64-bit ChaCha12 stream for that key;
//! 3. uniform doubles are formed as `(next_u64() >> 11) * 2^-53`, i.e. the
//!    top 53 bits of the next ChaCha word pair, giving a value in `[0, 1)`.
//!
//! Distinct stream ids under the same master seed yield independent streams,
//! so trials can run concurrently and still reproduce bit-exactly.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn expand_key(master_seed: u64) -> [u8; 32] {
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// A reproducible random stream addressed by `(master_seed, stream_id)`.
pub struct Stream {
    rng: ChaCha12Rng,
    master_seed: u64,
    stream_id: u64,
}

impl Stream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::from_seed(expand_key(master_seed));
        rng.set_stream(stream_id);
        Stream {
            rng,
            master_seed,
            stream_id,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal via Box-Muller; used by tests and examples that need
    /// generic random instances.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
