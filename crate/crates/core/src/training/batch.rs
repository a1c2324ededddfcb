use crate::channel::{llr, modulate, sigma_from_ebno, transmit, RngStream};
use crate::code::LinearCode;
use crate::error::{Error, Result};

/// Training frames: zero codeword sent over the channel at integer Eb/N0 steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub llrs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<u8>>,
    pub ebno_db: Vec<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }
}

/// The integer-dB grid lo, lo+1, … ≤ hi.
pub fn snr_grid(lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidArgument(format!("empty SNR range [{lo}, {hi}]")));
    }
    let steps = (hi - lo + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| lo + i as f64).collect())
}

/// Frames per grid point: equal shares, remainder to the lowest SNRs.
pub fn allocate(size: usize, points: usize) -> Vec<usize> {
    let (base, rem) = (size / points, size % points);
    (0..points).map(|i| base + usize::from(i < rem)).collect()
}

pub fn sample_batch(rng: &mut RngStream, code: &LinearCode, snr_range_db: (f64, f64), size: usize) -> Result<Batch> {
    if size == 0 {
        return Err(Error::InvalidArgument("minibatch size must be ≥ 1".into()));
    }
    let grid = snr_grid(snr_range_db.0, snr_range_db.1)?;
    let zero = vec![0u8; code.n()];
    let symbols = modulate(&zero);
    let mut batch = Batch {
        llrs: Vec::with_capacity(size),
        targets: Vec::with_capacity(size),
        ebno_db: Vec::with_capacity(size),
    };
    for (&snr, count) in grid.iter().zip(allocate(size, grid.len())) {
        let sigma = sigma_from_ebno(snr, code.rate())?;
        for _ in 0..count {
            let y = transmit(rng, &symbols, sigma);
            batch.llrs.push(llr(&y, sigma)?);
            batch.targets.push(zero.clone());
            batch.ebno_db.push(snr);
        }
    }
    Ok(batch)
}
