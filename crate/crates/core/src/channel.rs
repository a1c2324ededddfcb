//! Binary-input AWGN channel with BPSK mapping 0 → +1, 1 → −1.
//!
//! With that mapping the channel LLR log Pr(c=1|y)/Pr(c=0|y) is −2y/σ², so a
//! positive LLR favors bit 1. Every decoder in the crate uses this convention.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Noise standard deviation for a given Eb/N0 (dB) and code rate.
pub fn sigma_from_ebno(ebno_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!("rate must lie in (0, 1], got {rate}")));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelConfig {
    pub ebno_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelConfig {
    pub fn new(ebno_db: f64, rate: f64) -> Result<Self> {
        Ok(ChannelConfig {
            ebno_db,
            rate,
            sigma: sigma_from_ebno(ebno_db, rate)?,
        })
    }
}

/// Seeded random stream. Equal (seed, stream_id) pairs give equal sequences;
/// distinct stream ids are independent ChaCha streams of the same key.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

pub fn modulate(codeword: &[u8]) -> Vec<f64> {
    codeword.iter().map(|&b| 1.0 - 2.0 * (b & 1) as f64).collect()
}

/// Adds iid N(0, σ²) noise to each symbol.
pub fn transmit(rng: &mut RngStream, symbols: &[f64], sigma: f64) -> Vec<f64> {
    symbols.iter().map(|&x| x + sigma * rng.gaussian()).collect()
}

pub fn llr(received: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let scale = -2.0 / (sigma * sigma);
    Ok(received.iter().map(|&y| scale * y).collect())
}

/// Hard decision from an LLR-domain value: bit 1 iff strictly positive.
#[inline]
pub fn hard_decision(value: f64) -> u8 {
    (value > 0.0) as u8
}

/// Hard decision directly from the received symbol: bit 1 iff y < 0.
pub fn demap(received: &[f64]) -> Vec<u8> {
    received.iter().map(|&y| (y < 0.0) as u8).collect()
}
