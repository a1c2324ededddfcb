//! Monte-Carlo BER simulation with frame-error-targeted stopping.
//!
//! Frame `i` of SNR point `p` draws its information bits and noise from its
//! own stream `(seed, p·2⁴⁰ + i)`. Results therefore do not depend on how
//! frames are spread across workers, and decoders run on the same seed see
//! exactly the same frames (common random numbers).

use std::thread;

use rand::Rng;

use super::report::{BerPoint, BerReport, Provenance};
use crate::channel::{llr, modulate, sigma_from_ebno, transmit, RngStream};
use crate::code::LinearCode;
use crate::decoder::Decoder;
use crate::error::{Error, Result};

/// One simulated channel use.
#[derive(Debug)]
pub struct Frame<'a> {
    pub index: u64,
    pub ebno_db: f64,
    pub codeword: &'a [u8],
    pub received: &'a [f64],
    pub llr: &'a [f64],
    /// Per-frame seed for decoders that need their own randomness.
    pub decoder_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameResult {
    pub bits: Vec<u8>,
    pub iterations: usize,
}

/// Anything that maps a frame to hard decisions.
pub trait FrameDecoder: Sync {
    fn decode_frame(&self, frame: &Frame<'_>) -> Result<FrameResult>;
    /// Descriptor recorded in report provenance.
    fn describe(&self) -> String;
}

impl FrameDecoder for Decoder {
    fn decode_frame(&self, frame: &Frame<'_>) -> Result<FrameResult> {
        let out = self.decode(frame.llr)?;
        Ok(FrameResult {
            bits: out.hard_decisions,
            iterations: out.iterations_used,
        })
    }

    fn describe(&self) -> String {
        self.spec().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_frame_errors: 100,
            max_frames: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub snrs_db: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub workers: usize,
    /// Transmit the all-zero codeword instead of uniformly random codewords.
    pub zero_codeword: bool,
}

impl SweepConfig {
    pub fn new(snrs_db: Vec<f64>, seed: u64) -> Self {
        SweepConfig {
            snrs_db,
            stop: StopRule::default(),
            seed,
            workers: 1,
            zero_codeword: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snrs_db.is_empty() {
            return Err(Error::InvalidArgument("SNR grid is empty".into()));
        }
        if self.snrs_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("SNR grid contains a non-finite value".into()));
        }
        if self.stop.min_frame_errors == 0 || self.stop.max_frames == 0 {
            return Err(Error::InvalidArgument("min frame errors and max frames must be ≥ 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Per-frame outcome kept until it is merged in frame order.
#[derive(Clone, Copy, Debug)]
struct Tally {
    bit_errors: u64,
    iterations: u64,
}

fn frame_stream(seed: u64, point: usize, frame: u64) -> RngStream {
    RngStream::new(seed, ((point as u64) << 40) | frame)
}

fn simulate_frame(
    code: &LinearCode,
    decoders: &[&dyn FrameDecoder],
    cfg: &SweepConfig,
    point: usize,
    sigma: f64,
    index: u64,
) -> Result<Vec<Tally>> {
    let mut rng = frame_stream(cfg.seed, point, index);
    let codeword = if cfg.zero_codeword {
        vec![0u8; code.n()]
    } else {
        let info: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect();
        code.encode(&info)?
    };
    let received = transmit(&mut rng, &modulate(&codeword), sigma);
    let l = llr(&received, sigma)?;
    let frame = Frame {
        index,
        ebno_db: cfg.snrs_db[point],
        codeword: &codeword,
        received: &received,
        llr: &l,
        decoder_seed: rng.gen(),
    };
    decoders
        .iter()
        .map(|d| {
            let r = d.decode_frame(&frame)?;
            if r.bits.len() != codeword.len() {
                return Err(Error::Length {
                    expected: codeword.len(),
                    got: r.bits.len(),
                });
            }
            let bit_errors = r.bits.iter().zip(&codeword).filter(|(a, b)| a != b).count() as u64;
            Ok(Tally {
                bit_errors,
                iterations: r.iterations as u64,
            })
        })
        .collect()
}

/// Accumulates frames of one point for several decoders.
#[derive(Clone, Debug, Default)]
struct Acc {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
    bit_errors_sq: u128,
    iterations: u64,
}

impl Acc {
    fn add(&mut self, t: Tally) {
        self.frames += 1;
        self.frame_errors += u64::from(t.bit_errors > 0);
        self.bit_errors += t.bit_errors;
        self.bit_errors_sq += u128::from(t.bit_errors) * u128::from(t.bit_errors);
        self.iterations += t.iterations;
    }

    fn point(&self, ebno_db: f64, n: usize) -> BerPoint {
        BerPoint::from_counts(
            ebno_db,
            self.frames,
            self.frame_errors,
            self.frames * n as u64,
            self.bit_errors,
            self.iterations,
            Some(self.bit_errors_sq),
        )
    }
}

/// Runs every decoder on the same frames. Each point stops once every decoder
/// has reached the frame-error target, or at the frame cap.
pub fn run_ber_comparison(code: &LinearCode, decoders: &[&dyn FrameDecoder], cfg: &SweepConfig) -> Result<Vec<BerReport>> {
    cfg.validate()?;
    if decoders.is_empty() {
        return Err(Error::InvalidArgument("no decoders to simulate".into()));
    }
    let mut reports: Vec<BerReport> = decoders
        .iter()
        .map(|d| BerReport {
            provenance: Provenance::new(code, &d.describe(), cfg),
            points: Vec::with_capacity(cfg.snrs_db.len()),
        })
        .collect();
    let batch = (64 * cfg.workers) as u64;
    for (p, &snr) in cfg.snrs_db.iter().enumerate() {
        let sigma = sigma_from_ebno(snr, code.rate())?;
        let mut accs = vec![Acc::default(); decoders.len()];
        let mut next = 0u64;
        'point: while next < cfg.stop.max_frames {
            let end = (next + batch).min(cfg.stop.max_frames);
            let results = simulate_range(code, decoders, cfg, p, sigma, next, end)?;
            for tallies in results {
                for (acc, t) in accs.iter_mut().zip(tallies) {
                    acc.add(t);
                }
                if accs.iter().all(|a| a.frame_errors >= cfg.stop.min_frame_errors) {
                    break 'point;
                }
            }
            next = end;
        }
        for (report, acc) in reports.iter_mut().zip(&accs) {
            report.points.push(acc.point(snr, code.n()));
        }
    }
    Ok(reports)
}

fn simulate_range(
    code: &LinearCode,
    decoders: &[&dyn FrameDecoder],
    cfg: &SweepConfig,
    point: usize,
    sigma: f64,
    start: u64,
    end: u64,
) -> Result<Vec<Vec<Tally>>> {
    let count = (end - start) as usize;
    let workers = cfg.workers.min(count).max(1);
    if workers == 1 {
        return (start..end).map(|i| simulate_frame(code, decoders, cfg, point, sigma, i)).collect();
    }
    // round-robin: worker w takes frames start + w, start + w + workers, ...
    let mut per_worker: Vec<Vec<Result<Vec<Tally>>>> = Vec::with_capacity(workers);
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (start + w as u64..end)
                        .step_by(workers)
                        .map(|i| simulate_frame(code, decoders, cfg, point, sigma, i))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            per_worker.push(h.join().expect("worker panicked"));
        }
    });
    let mut iters: Vec<_> = per_worker.into_iter().map(|v| v.into_iter()).collect();
    (0..count).map(|j| iters[j % workers].next().expect("frame assigned")).collect()
}

/// Single-decoder sweep.
pub fn run_ber_sweep(code: &LinearCode, decoder: &dyn FrameDecoder, cfg: &SweepConfig) -> Result<BerReport> {
    Ok(run_ber_comparison(code, &[decoder], cfg)?.pop().expect("one report"))
}
