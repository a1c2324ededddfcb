use std::fmt::Write as _;
use std::thread;

use super::batch::{sample_batch, Batch};
use super::loss::{loss_from_totals, LossConfig, LossKind};
use super::optim::{Optimizer, OptimizerConfig, OptimizerKind};
use super::tape::{Tape, Var};
use crate::channel::RngStream;
use crate::code::{LinearCode, TannerGraph};
use crate::decoder::arith::Plain;
use crate::decoder::engine::unroll;
use crate::decoder::params::{ParamGroup, ParamSet, Parameters};
use crate::decoder::spec::DecoderSpec;
use crate::error::{Error, Result};
use crate::kv::KeyValues;

/// Which groups receive gradient updates. By default every group except the
/// channel-LLR weights w_v and w̃_v, which stay at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trainable {
    groups: Vec<ParamGroup>,
}

impl Default for Trainable {
    fn default() -> Self {
        Trainable {
            groups: ParamGroup::ALL
                .into_iter()
                .filter(|g| !matches!(g, ParamGroup::LlrWeights | ParamGroup::SelfOutWeights))
                .collect(),
        }
    }
}

impl Trainable {
    pub fn all() -> Self {
        Trainable {
            groups: ParamGroup::ALL.to_vec(),
        }
    }

    pub fn only(groups: &[ParamGroup]) -> Self {
        Trainable { groups: groups.to_vec() }
    }

    pub fn contains(&self, g: ParamGroup) -> bool {
        self.groups.contains(&g)
    }

    /// Flat mask in parameter layout order.
    pub fn mask(&self, params: &Parameters) -> Vec<bool> {
        params.iter_flat().map(|(g, _)| self.contains(g)).collect()
    }
}

/// Records one frame's decode and loss on `tape` (cleared first). Trainable
/// parameters become leaves indexed by their flat position; everything else
/// is a constant. Early stopping is always off so the graph has static shape.
pub fn forward_with_tape(
    tape: &mut Tape,
    spec: &DecoderSpec,
    graph: &TannerGraph,
    params: &Parameters,
    trainable: &Trainable,
    llr: &[f64],
    targets: &[u8],
    loss: &LossConfig,
) -> Result<Var> {
    params.check_shapes(spec, graph)?;
    tape.clear();
    let mut flat = 0usize;
    let handles: ParamSet<Var> = params.map(|g, _, &x| {
        let v = if trainable.contains(g) {
            tape.param(flat, x)
        } else {
            tape.push_const(x)
        };
        flat += 1;
        v
    });
    let llr_vars: Vec<Var> = llr.iter().map(|&x| tape.push_const(x)).collect();
    let run = unroll(tape, spec, graph, &handles, &llr_vars, false)?;
    loss_from_totals(tape, &run.totals, targets, loss)
}

/// Loss of one frame evaluated directly, without recording.
pub fn frame_loss(
    spec: &DecoderSpec,
    graph: &TannerGraph,
    params: &Parameters,
    llr: &[f64],
    targets: &[u8],
    loss: &LossConfig,
) -> Result<f64> {
    params.check_shapes(spec, graph)?;
    let run = unroll(&mut Plain, spec, graph, params, llr, false)?;
    loss_from_totals(&mut Plain, &run.totals, targets, loss)
}

/// Gradient of the recorded loss as a parameter set (zero for frozen groups).
pub fn backward(tape: &Tape, loss: Var, like: &Parameters) -> Result<Parameters> {
    let flat = tape.backward(loss, like.total_len());
    let mut out = like.zeros_like();
    out.set_flat(&flat)?;
    Ok(out)
}

/// Mean loss and flat mean gradient over a batch. Per-frame results are
/// summed in frame order whatever the worker count, so the result does not
/// depend on `workers`.
pub fn batch_gradient(
    spec: &DecoderSpec,
    graph: &TannerGraph,
    params: &Parameters,
    trainable: &Trainable,
    batch: &Batch,
    loss: &LossConfig,
    workers: usize,
) -> Result<(f64, Vec<f64>)> {
    let p = params.total_len();
    let frames = batch.len();
    if frames == 0 {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let one = |tape: &mut Tape, i: usize| -> Result<(f64, Vec<f64>)> {
        let l = forward_with_tape(tape, spec, graph, params, trainable, &batch.llrs[i], &batch.targets[i], loss)?;
        Ok((tape.values()[l.index()], tape.backward(l, p)))
    };
    let mut loss_sum = 0.0;
    let mut grad_sum = vec![0.0; p];
    let mut accumulate = |(l, g): (f64, Vec<f64>)| {
        loss_sum += l;
        grad_sum.iter_mut().zip(&g).for_each(|(s, x)| *s += x);
    };
    let workers = workers.clamp(1, frames);
    if workers == 1 {
        let mut tape = Tape::new();
        for i in 0..frames {
            accumulate(one(&mut tape, i)?);
        }
    } else {
        let mut slots: Vec<Option<Result<(f64, Vec<f64>)>>> = (0..frames).map(|_| None).collect();
        let chunk = frames.div_ceil(workers);
        thread::scope(|s| {
            for (w, part) in slots.chunks_mut(chunk).enumerate() {
                let one = &one;
                s.spawn(move || {
                    let mut tape = Tape::new();
                    for (j, slot) in part.iter_mut().enumerate() {
                        *slot = Some(one(&mut tape, w * chunk + j));
                    }
                });
            }
        });
        for slot in slots {
            accumulate(slot.expect("every frame evaluated")?);
        }
    }
    let inv = 1.0 / frames as f64;
    grad_sum.iter_mut().for_each(|g| *g *= inv);
    Ok((loss_sum * inv, grad_sum))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub loss: LossConfig,
    pub optimizer: OptimizerConfig,
    pub snr_range_db: (f64, f64),
    pub trainable: Trainable,
    pub seed: u64,
    pub workers: usize,
}

impl TrainConfig {
    pub fn new(loss: LossConfig, optimizer: OptimizerConfig, snr_range_db: (f64, f64), seed: u64) -> Self {
        TrainConfig {
            loss,
            optimizer,
            snr_range_db,
            trainable: Trainable::default(),
            seed,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    /// Minibatch loss evaluated before the update of this step.
    pub loss: f64,
    /// Mean γ after the update, when the decoder is relaxed.
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub params: Parameters,
    pub trace: Vec<TraceRow>,
}

impl TrainOutcome {
    pub fn losses(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.loss).collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.trace.iter().filter_map(|r| r.gamma).collect()
    }
}

fn mean_gamma(params: &Parameters) -> Option<f64> {
    let g = params.gamma();
    (!g.is_empty()).then(|| g.iter().sum::<f64>() / g.len() as f64)
}

/// Divergence guard: a non-finite loss or gradient aborts training.
pub fn check_finite(step: usize, loss: f64, grad: &[f64]) -> Result<()> {
    if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Diverged { step, loss });
    }
    Ok(())
}

pub fn train(code: &LinearCode, spec: &DecoderSpec, cfg: &TrainConfig, init: Parameters) -> Result<TrainOutcome> {
    train_with(code, spec, cfg, init, |_| {})
}

/// Runs `cfg.optimizer.steps` minibatches. `on_step` sees every trace row as
/// it is produced. A non-finite loss or gradient aborts with the step index.
pub fn train_with(
    code: &LinearCode,
    spec: &DecoderSpec,
    cfg: &TrainConfig,
    init: Parameters,
    mut on_step: impl FnMut(&TraceRow),
) -> Result<TrainOutcome> {
    let graph = code.graph();
    init.check_shapes(spec, graph)?;
    let mut params = init;
    let mask = cfg.trainable.mask(&params);
    let mut flat = params.flatten();
    let mut opt = Optimizer::new(cfg.optimizer.clone(), flat.len())?;
    let mut rng = RngStream::new(cfg.seed, 0);
    let mut trace = Vec::with_capacity(cfg.optimizer.steps);
    for step in 0..cfg.optimizer.steps {
        let batch = sample_batch(&mut rng, code, cfg.snr_range_db, cfg.optimizer.minibatch_size)?;
        let (loss, grad) = batch_gradient(spec, graph, &params, &cfg.trainable, &batch, &cfg.loss, cfg.workers)?;
        check_finite(step, loss, &grad)?;
        let before_finite: Vec<bool> = flat.iter().map(|x| x.is_finite()).collect();
        opt.step(&mut flat, &grad, &mask)?;
        if flat.iter().zip(&before_finite).any(|(x, &was)| was && !x.is_finite()) {
            return Err(Error::Diverged { step, loss });
        }
        params.set_flat(&flat)?;
        let row = TraceRow {
            step,
            loss,
            gamma: mean_gamma(&params),
        };
        on_step(&row);
        trace.push(row);
    }
    Ok(TrainOutcome { params, trace })
}

/// CSV with header `step,loss,gamma`; the γ column is empty when absent.
pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("step,loss,gamma\n");
    for r in trace {
        let _ = match r.gamma {
            Some(g) => writeln!(out, "{},{:?},{:?}", r.step, r.loss, g),
            None => writeln!(out, "{},{:?},", r.step, r.loss),
        };
    }
    out
}

/// Key-value training run manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainManifest {
    pub code: String,
    pub spec: DecoderSpec,
    pub config: TrainConfig,
}

impl TrainManifest {
    pub fn to_kv(&self) -> KeyValues {
        let c = &self.config;
        let o = &c.optimizer;
        let mut kv = KeyValues::new();
        kv.set("code", &self.code)
            .set("spec", self.spec.to_string())
            .set("optimizer", o.kind)
            .set("learning_rate", o.learning_rate)
            .set("minibatch_size", o.minibatch_size)
            .set("steps", o.steps)
            .set("loss", c.loss.kind)
            .set("snr_lo", c.snr_range_db.0)
            .set("snr_hi", c.snr_range_db.1)
            .set("seed", c.seed)
            .set("workers", c.workers);
        if let Some(taps) = &c.loss.taps {
            kv.set("taps", taps.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "));
        }
        kv
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let spec: DecoderSpec = kv.require("spec")?.parse()?;
        let kind: OptimizerKind = kv.parse_value("optimizer")?.unwrap_or(OptimizerKind::RmsProp);
        let lr = kv.parse_value("learning_rate")?.unwrap_or(0.001);
        let minibatch = kv.parse_value("minibatch_size")?.unwrap_or(120);
        let steps = kv.parse_value("steps")?.unwrap_or(1000);
        let loss_kind: LossKind = kv.parse_value("loss")?.unwrap_or(LossKind::Multiloss);
        let taps = match kv.get("taps") {
            Some(t) => Some(
                t.split_whitespace()
                    .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad tap '{x}'"))))
                    .collect::<Result<Vec<usize>>>()?,
            ),
            None => None,
        };
        let mut config = TrainConfig::new(
            LossConfig { kind: loss_kind, taps },
            OptimizerConfig::new(kind, lr, minibatch, steps),
            (
                kv.parse_value("snr_lo")?.unwrap_or(1.0),
                kv.parse_value("snr_hi")?.unwrap_or(8.0),
            ),
            kv.parse_value("seed")?.unwrap_or(0),
        );
        config.workers = kv.parse_value("workers")?.unwrap_or(1);
        Ok(TrainManifest {
            code: kv.require("code")?.to_string(),
            spec,
            config,
        })
    }
}
