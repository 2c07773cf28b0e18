//! BPSK over AWGN and channel log-likelihood ratios.
//!
//! LLR convention: `L = ln P(x=0|r) - ln P(x=1|r)`, so a positive value favours
//! bit 0 and the hard decision is 1 exactly when `L < 0`.
//!
//! SNR values are Eb/N0 in dB with unit-energy BPSK symbols, so the noise
//! standard deviation per real dimension is `(2 · R · 10^(snr/10))^(-1/2)`.
//!
//! Randomness comes from ChaCha8 streams keyed by a master seed and a tuple
//! of stream indices (worker, batch, sample, ...). The key is derived with
//! SplitMix64 finalisation, so any stream can be regenerated independently
//! of how work is split between threads. Gaussian draws use the ziggurat
//! sampler of `rand_distr::StandardNormal`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("code rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),
}

/// Resolved channel operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub snr_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(snr_db: f64, rate: f64) -> Result<Self, ChannelError> {
        Ok(Self {
            snr_db,
            rate,
            sigma: sigma_from_snr(snr_db, rate)?,
        })
    }
}

/// Noise standard deviation for Eb/N0 `snr_db` at code rate `rate`.
pub fn sigma_from_snr(snr_db: f64, rate: f64) -> Result<f64, ChannelError> {
    // rate = 1 is admitted for the uncoded reference lane
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::InvalidRate(rate));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0)).sqrt())
}

/// Bit 0 → +1, bit 1 → -1.
pub fn modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Adds i.i.d. `N(0, sigma²)` noise to every symbol.
pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    symbols
        .iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + sigma * z
        })
        .collect()
}

/// Channel LLRs `2 r / sigma²`.
pub fn llr_from_received(received: &[f64], sigma: f64) -> Vec<f64> {
    let scale = 2.0 / (sigma * sigma);
    received.iter().map(|&r| scale * r).collect()
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic generator for stream `indices` under `master_seed`.
pub fn stream_rng(master_seed: u64, indices: &[u64]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(master_seed);
    for &i in indices {
        state = splitmix64(state ^ splitmix64(i.wrapping_add(GOLDEN)));
    }
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Tags keeping training, evaluation and diagnostic streams disjoint.
pub mod streams {
    pub const TRAIN: u64 = 1;
    pub const EVAL: u64 = 2;
    pub const DIAG: u64 = 3;
    pub const GRADCHECK: u64 = 4;
}
