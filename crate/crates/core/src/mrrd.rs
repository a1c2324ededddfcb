//! Modified random redundant decoding: `m` branches, each running up to `c`
//! short inner decodes separated by random code automorphisms, with
//! least-metric selection among the valid codewords found.

use std::time::{Duration, Instant};

use crate::channel::{hard_decision, RngStream};
use crate::code::{sample_automorphism, LinearCode, Permutation};
use crate::decoder::arith::Plain;
use crate::decoder::engine::{syndrome_ok, unroll};
use crate::decoder::{DecoderSpec, Parameters};
use crate::error::{Error, Result};
use crate::harness::oracle::correlation;
use crate::harness::{Frame, FrameDecoder, FrameResult};
use crate::kv::KeyValues;

#[derive(Clone, Debug, PartialEq)]
pub struct MrrdConfig {
    pub m: usize,
    pub c: usize,
    pub inner_iterations: usize,
    /// Inner decoder; its iteration count is replaced by `inner_iterations`.
    pub inner_spec: DecoderSpec,
    pub inner_params: Parameters,
    /// Feed the permuted marginal LLRs of a failed block into the next one
    /// instead of the permuted channel LLRs.
    pub extrinsic_carry: bool,
}

impl MrrdConfig {
    /// Plain-BP inner decoder with default parameters.
    pub fn plain(code: &LinearCode, m: usize, c: usize) -> Result<Self> {
        let spec = DecoderSpec::plain_bp(2);
        let params = Parameters::init(&spec, code.graph());
        Self::new(m, c, 2, spec, params)
    }

    pub fn new(m: usize, c: usize, inner_iterations: usize, inner_spec: DecoderSpec, inner_params: Parameters) -> Result<Self> {
        let cfg = MrrdConfig {
            m,
            c,
            inner_iterations,
            inner_spec: inner_spec.with_iterations(inner_iterations).with_early_stop(false),
            inner_params,
            extrinsic_carry: false,
        };
        if m == 0 || c == 0 || inner_iterations == 0 {
            return Err(Error::InvalidArgument("m, c and inner_iterations must all be ≥ 1".into()));
        }
        cfg.inner_spec.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self, code: &LinearCode) -> Result<()> {
        self.inner_params.check_shapes(&self.inner_spec, code.graph())?;
        // automorphism sampling must be supported for this length
        sample_automorphism(&mut RngStream::new(0, 0), code.n()).map(|_| ())
    }
}

/// A valid codeword found by one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    /// Codeword in the original coordinate frame.
    pub codeword: Vec<u8>,
    /// Cumulative permutation from the original frame to the branch frame.
    pub permutation: Permutation,
    pub branch: usize,
    /// 0-based block in which the branch succeeded.
    pub block: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MrrdStats {
    pub iterations: usize,
    pub blocks: usize,
    pub elapsed: Duration,
    pub branches_with_candidates: Vec<usize>,
}

/// One branch. `first_block` receives the hard decisions of the
/// unpermuted first block, which double as the no-candidate fallback.
fn branch(
    code: &LinearCode,
    cfg: &MrrdConfig,
    rng: &mut RngStream,
    branch_id: usize,
    llr: &[f64],
    first_block: &mut Option<Vec<u8>>,
) -> Result<(Option<Candidate>, MrrdStats)> {
    let graph = code.graph();
    let mut stats = MrrdStats::default();
    let mut perm = Permutation::identity(code.n());
    let mut current = llr.to_vec();
    for block in 0..cfg.c {
        let run = unroll(&mut Plain, &cfg.inner_spec, graph, &cfg.inner_params, &current, false)?;
        stats.iterations += cfg.inner_iterations;
        stats.blocks += 1;
        let marginal = run.totals.last().expect("inner_iterations ≥ 1");
        let bits: Vec<u8> = marginal.iter().map(|&x| hard_decision(x)).collect();
        if block == 0 && first_block.is_none() {
            *first_block = Some(bits.clone());
        }
        if syndrome_ok(graph, &bits) {
            let codeword = perm.inverse().apply(&bits);
            debug_assert!(code.is_codeword(&codeword).unwrap_or(false));
            stats.branches_with_candidates.push(branch_id);
            return Ok((
                Some(Candidate {
                    codeword,
                    permutation: perm,
                    branch: branch_id,
                    block,
                }),
                stats,
            ));
        }
        if block + 1 < cfg.c {
            let p = sample_automorphism(rng, code.n())?;
            current = if cfg.extrinsic_carry { p.apply(marginal) } else { p.apply(&current) };
            perm = perm.then(&p);
        }
    }
    Ok((None, stats))
}

/// Runs a single branch with its own RNG stream.
pub fn run_branch(code: &LinearCode, cfg: &MrrdConfig, rng: &mut RngStream, branch_id: usize, llr: &[f64]) -> Result<(Option<Candidate>, MrrdStats)> {
    branch(code, cfg, rng, branch_id, llr, &mut None)
}

/// Index of the candidate with the largest BPSK correlation to `received`;
/// ties keep the earliest (lowest branch) candidate.
pub fn least_metric_select(candidates: &[Candidate], received: &[f64]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let s = correlation(received, &c.codeword);
        if best.map_or(true, |(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidArgument("least-metric selection over no candidates".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MrrdOutput {
    pub codeword: Vec<u8>,
    /// Winning candidate, or `None` when the fallback was used.
    pub winner: Option<Candidate>,
    pub candidates: Vec<Candidate>,
    pub stats: MrrdStats,
}

/// Decodes one frame. Branch `b` draws permutations from stream
/// `(base_seed, b)`, so results do not depend on branch scheduling and a run
/// with more branches extends, rather than replaces, the smaller run.
pub fn mrrd_decode(code: &LinearCode, cfg: &MrrdConfig, base_seed: u64, llr: &[f64], received: &[f64]) -> Result<MrrdOutput> {
    if llr.len() != code.n() || received.len() != code.n() {
        return Err(Error::Length {
            expected: code.n(),
            got: if llr.len() != code.n() { llr.len() } else { received.len() },
        });
    }
    let start = Instant::now();
    let mut stats = MrrdStats::default();
    let mut candidates = Vec::new();
    let mut first_block = None;
    for b in 0..cfg.m {
        let mut rng = RngStream::new(base_seed, b as u64);
        let (cand, s) = branch(code, cfg, &mut rng, b, llr, &mut first_block)?;
        stats.iterations += s.iterations;
        stats.blocks += s.blocks;
        stats.branches_with_candidates.extend(s.branches_with_candidates);
        candidates.extend(cand);
    }
    let (codeword, winner) = if candidates.is_empty() {
        // every branch's first block decodes the unpermuted LLRs, which is
        // exactly the fallback decode
        (first_block.expect("at least one block ran"), None)
    } else {
        let w = least_metric_select(&candidates, received)?;
        (candidates[w].codeword.clone(), Some(candidates[w].clone()))
    };
    stats.elapsed = start.elapsed();
    Ok(MrrdOutput {
        codeword,
        winner,
        candidates,
        stats,
    })
}

/// mRRD bound to a code, usable by the BER harness.
#[derive(Clone, Debug)]
pub struct MrrdDecoder {
    pub code: LinearCode,
    pub config: MrrdConfig,
}

impl MrrdDecoder {
    pub fn new(code: LinearCode, config: MrrdConfig) -> Result<Self> {
        config.validate(&code)?;
        Ok(MrrdDecoder { code, config })
    }
}

impl FrameDecoder for MrrdDecoder {
    fn decode_frame(&self, frame: &Frame<'_>) -> Result<FrameResult> {
        let out = mrrd_decode(&self.code, &self.config, frame.decoder_seed, frame.llr, frame.received)?;
        Ok(FrameResult {
            bits: out.codeword,
            iterations: out.stats.iterations,
        })
    }

    fn describe(&self) -> String {
        format!(
            "mrrd(m={},c={},inner_iterations={},extrinsic_carry={},inner={})",
            self.config.m,
            self.config.c,
            self.config.inner_iterations,
            u8::from(self.config.extrinsic_carry),
            self.config.inner_spec
        )
    }
}

/// Experiment file: `m`, `c`, `inner_iterations`, `inner_spec`, optional
/// `inner_params` (parameter bundle path), `extrinsic_carry`, `seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct MrrdExperiment {
    pub m: usize,
    pub c: usize,
    pub inner_iterations: usize,
    pub inner_spec: DecoderSpec,
    pub inner_params: Option<String>,
    pub extrinsic_carry: bool,
    pub seed: u64,
}

impl MrrdExperiment {
    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        Ok(MrrdExperiment {
            m: kv.parse_value("m")?.unwrap_or(1),
            c: kv.parse_value("c")?.unwrap_or(30),
            inner_iterations: kv.parse_value("inner_iterations")?.unwrap_or(2),
            inner_spec: kv.parse_value("inner_spec")?.unwrap_or_else(|| DecoderSpec::plain_bp(2)),
            inner_params: kv.get("inner_params").map(str::to_string),
            extrinsic_carry: kv.parse_value::<u8>("extrinsic_carry")?.unwrap_or(0) != 0,
            seed: kv.parse_value("seed")?.unwrap_or(0),
        })
    }

    pub fn to_kv(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("m", self.m)
            .set("c", self.c)
            .set("inner_iterations", self.inner_iterations)
            .set("inner_spec", &self.inner_spec)
            .set("extrinsic_carry", u8::from(self.extrinsic_carry))
            .set("seed", self.seed);
        if let Some(p) = &self.inner_params {
            kv.set("inner_params", p);
        }
        kv
    }
}
