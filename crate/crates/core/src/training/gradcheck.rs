//! Finite-difference audit of tape gradients.

use rand::Rng;

use super::loss::LossConfig;
use super::tape::{Branch, Op, Tape};
use super::train::{forward_with_tape, frame_loss, Trainable};
use crate::channel::{llr, modulate, sigma_from_ebno, transmit, RngStream};
use crate::code::LinearCode;
use crate::decoder::params::{ParamGroup, Parameters};
use crate::decoder::spec::DecoderSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckConfig {
    /// Non-kink points to evaluate.
    pub points: usize,
    /// Central-difference step.
    pub h: f64,
    pub seed: u64,
    /// Eb/N0 range (dB) the random frames are drawn from.
    pub ebno_db: (f64, f64),
    pub loss: LossConfig,
    /// Denominator floor of the relative error, so that gradients that are
    /// zero up to rounding are compared absolutely.
    pub rel_floor: f64,
    /// Give up after this many sampled points (kink-adjacent ones included).
    pub max_attempts: usize,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        GradcheckConfig {
            points: 100,
            h: 1e-4,
            seed: 1,
            ebno_db: (1.0, 4.0),
            loss: LossConfig::multiloss(),
            rel_floor: 1e-6,
            max_attempts: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckReport {
    pub spec: String,
    pub num_params: usize,
    pub points_checked: usize,
    pub kink_excluded: usize,
    pub max_rel_error: f64,
    /// Largest |autodiff − finite difference| seen.
    pub max_abs_error: f64,
}

/// Relative error with a denominator floor.
pub fn relative_error(autodiff: f64, fd: f64, floor: f64) -> f64 {
    (autodiff - fd).abs() / autodiff.abs().max(fd.abs()).max(floor)
}

type Signature = (Vec<Op>, Vec<Branch>);

fn signature(tape: &Tape) -> Signature {
    (tape.ops().to_vec(), tape.branches())
}

/// Random parameters near the classical decoder: weights in [0.5, 1.5],
/// offsets in [0, 0.5], gamma_raw in [−2, 2]. Frozen groups keep their values.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, base: &Parameters, trainable: &Trainable) -> Parameters {
    base.map(|g, _, &x| {
        if !trainable.contains(g) {
            return x;
        }
        match g {
            ParamGroup::Offsets => rng.gen_range(0.0..0.5),
            ParamGroup::GammaRaw => rng.gen_range(-2.0..2.0),
            _ => rng.gen_range(0.5..1.5),
        }
    })
}

/// Compares tape gradients with central differences of the directly
/// evaluated loss at random points. A point is kink-adjacent when moving any
/// trainable parameter by ±h changes the recorded operation structure (min
/// selections, sign factors) or the branch of any clip, |·|, max(·,0),
/// atanh clamp or log floor; such points are skipped and counted.
pub fn gradcheck(code: &LinearCode, spec: &DecoderSpec, trainable: &Trainable, cfg: &GradcheckConfig) -> Result<GradcheckReport> {
    let graph = code.graph();
    let codebook = code.codebook()?;
    let base = Parameters::init(spec, graph);
    let mask = trainable.mask(&base);
    let num_params = mask.iter().filter(|&&m| m).count();
    let mut rng = RngStream::new(cfg.seed, 0);
    let mut tape = Tape::new();
    let mut probe = Tape::new();
    let mut report = GradcheckReport {
        spec: spec.to_string(),
        num_params,
        points_checked: 0,
        kink_excluded: 0,
        max_rel_error: 0.0,
        max_abs_error: 0.0,
    };
    let mut attempts = 0;
    while report.points_checked < cfg.points {
        if attempts >= cfg.max_attempts {
            return Err(Error::InvalidArgument(format!(
                "only {} non-kink points found in {} attempts",
                report.points_checked, attempts
            )));
        }
        attempts += 1;
        let params = random_params(&mut rng, &base, trainable);
        let cw = &codebook[rng.gen_range(0..codebook.len())];
        let snr = rng.gen_range(cfg.ebno_db.0..=cfg.ebno_db.1);
        let sigma = sigma_from_ebno(snr, code.rate())?;
        let frame = llr(&transmit(&mut rng, &modulate(cw), sigma), sigma)?;

        let loss = forward_with_tape(&mut tape, spec, graph, &params, trainable, &frame, cw, &cfg.loss)?;
        let sig = signature(&tape);
        let grad = tape.backward(loss, mask.len());
        let flat = params.flatten();

        let mut kinked = false;
        let mut fd = vec![0.0; mask.len()];
        let mut moved = params.clone();
        'params: for i in (0..mask.len()).filter(|&i| mask[i]) {
            let mut values = [0.0; 2];
            for (slot, dir) in [1.0, -1.0].into_iter().enumerate() {
                let mut f = flat.clone();
                f[i] += dir * cfg.h;
                moved.set_flat(&f)?;
                forward_with_tape(&mut probe, spec, graph, &moved, trainable, &frame, cw, &cfg.loss)?;
                if signature(&probe) != sig {
                    kinked = true;
                    break 'params;
                }
                values[slot] = frame_loss(spec, graph, &moved, &frame, cw, &cfg.loss)?;
            }
            fd[i] = (values[0] - values[1]) / (2.0 * cfg.h);
        }
        if kinked {
            report.kink_excluded += 1;
            continue;
        }
        for i in (0..mask.len()).filter(|&i| mask[i]) {
            report.max_rel_error = report.max_rel_error.max(relative_error(grad[i], fd[i], cfg.rel_floor));
            report.max_abs_error = report.max_abs_error.max((grad[i] - fd[i]).abs());
        }
        report.points_checked += 1;
    }
    Ok(report)
}
