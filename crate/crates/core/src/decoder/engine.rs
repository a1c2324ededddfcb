use super::arith::{sigmoid, Arith, Plain};
use super::kernels::{
    check_update_min_sum, check_update_sum_product, marginalize, relax_in_place, variable_update, EdgeScalars,
    MessageDomain, MinSumCorrection, OutSide, RelaxState, VarEdgeWeights, VarSide,
};
use super::params::{ParamSet, Parameters};
use super::spec::{CheckRule, DecoderSpec, EdgeIndexing, WeightMode};
use crate::channel::hard_decision;
use crate::code::{LinearCode, TannerGraph};
use crate::error::{Error, Result};

/// Result of one unrolled run on any backend.
#[derive(Clone, Debug)]
pub struct Unrolled<V> {
    /// Marginal LLR totals after each executed iteration.
    pub totals: Vec<Vec<V>>,
    /// Check → variable messages after the last executed iteration.
    pub check_messages: Vec<V>,
    pub iterations_used: usize,
    /// Hard decisions of the last executed iteration satisfy every check.
    pub valid: bool,
}

fn slice_layer<V>(v: &[V], layer: usize, per_layer: usize) -> &[V] {
    if v.len() == per_layer {
        v
    } else {
        &v[layer * per_layer..(layer + 1) * per_layer]
    }
}

pub(crate) fn syndrome_ok(graph: &TannerGraph, bits: &[u8]) -> bool {
    (0..graph.num_checks()).all(|c| {
        graph
            .check_edges(c)
            .iter()
            .fold(0u8, |acc, &e| acc ^ bits[graph.edge_var(e as usize)])
            == 0
    })
}

/// Runs `spec.iterations` flooding iterations: variable update, check update,
/// optional relaxation, marginalization. With `early_stop`, halts after the
/// first iteration whose hard decisions form a codeword.
pub fn unroll<A: Arith>(
    a: &mut A,
    spec: &DecoderSpec,
    graph: &TannerGraph,
    params: &ParamSet<A::V>,
    llr: &[A::V],
    early_stop: bool,
) -> Result<Unrolled<A::V>> {
    spec.validate()?;
    let n_e = graph.num_edges();
    let n = graph.num_vars();
    if llr.len() != n {
        return Err(Error::Length {
            expected: n,
            got: llr.len(),
        });
    }
    let pair_offsets = (spec.is_neural_bp() && spec.indexing == EdgeIndexing::Pair).then(|| graph.pair_offsets());
    let var_per_layer = match spec.indexing {
        EdgeIndexing::Source => n_e,
        EdgeIndexing::Pair => graph.num_var_edge_pairs(),
    };

    let (gamma, one_minus_gamma): (Vec<A::V>, Vec<A::V>) = if params.gamma_raw.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let one = a.constant(1.0);
        params
            .gamma_raw
            .iter()
            .map(|&r| {
                let g = a.sigmoid(r);
                (g, a.sub(one, g))
            })
            .unzip()
    };

    let zero = a.constant(0.0);
    let mut c2v = vec![zero; n_e];
    let mut v2c = Vec::with_capacity(n_e);
    let mut raw = Vec::with_capacity(n_e);
    let mut relax_state = RelaxState::new();
    let mut totals = Vec::with_capacity(spec.iterations);
    let mut valid = false;
    let mut bits = vec![0u8; n];

    for t in 0..spec.iterations {
        let layer = spec.layer_of(t);
        let neural_bp = spec.is_neural_bp();

        let var_side = if neural_bp {
            VarSide {
                llr_weights: Some(&params.llr_weights),
                edges: match &pair_offsets {
                    Some(offsets) => VarEdgeWeights::Pair {
                        weights: slice_layer(&params.var_weights, layer, var_per_layer),
                        offsets,
                    },
                    None => VarEdgeWeights::Source(slice_layer(&params.var_weights, layer, var_per_layer)),
                },
            }
        } else {
            VarSide::plain()
        };
        let sum_product = spec.check_rule == CheckRule::SumProduct;
        variable_update(a, graph, llr, &c2v, &var_side, spec.clip, sum_product, &mut v2c)?;

        match spec.check_rule {
            CheckRule::SumProduct => check_update_sum_product(a, graph, &v2c, MessageDomain::Tanh, &mut raw)?,
            CheckRule::MinSum => {
                let correction = match spec.weight_mode {
                    WeightMode::None => MinSumCorrection::None,
                    WeightMode::ScalarWeight => MinSumCorrection::Weight(EdgeScalars::Scalar(params.check_weights[0])),
                    WeightMode::ScalarOffset => MinSumCorrection::Offset(EdgeScalars::Scalar(params.offsets[0])),
                    WeightMode::PerEdgeWeight => {
                        MinSumCorrection::Weight(EdgeScalars::PerEdge(slice_layer(&params.check_weights, layer, n_e)))
                    }
                    WeightMode::PerEdgeOffset => {
                        MinSumCorrection::Offset(EdgeScalars::PerEdge(slice_layer(&params.offsets, layer, n_e)))
                    }
                };
                check_update_min_sum(a, graph, &v2c, &correction, spec.fixed_post_scale, &mut raw)?;
            }
        }
        if !gamma.is_empty() {
            relax_in_place(a, &mut raw, &mut relax_state, &gamma, &one_minus_gamma);
        }
        std::mem::swap(&mut c2v, &mut raw);

        let out_side = if neural_bp {
            OutSide {
                self_weights: Some(&params.self_out_weights),
                edge_weights: Some(slice_layer(&params.out_weights, layer, n_e)),
            }
        } else {
            OutSide::plain()
        };
        let mut marg = Vec::with_capacity(n);
        marginalize(a, graph, llr, &c2v, &out_side, &mut marg)?;
        for (b, &m) in bits.iter_mut().zip(&marg) {
            *b = hard_decision(a.value(m));
        }
        totals.push(marg);
        valid = syndrome_ok(graph, &bits);
        if early_stop && valid {
            break;
        }
    }
    Ok(Unrolled {
        iterations_used: totals.len(),
        totals,
        check_messages: c2v,
        valid,
    })
}

/// Output of [`decode`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutput {
    /// Marginal LLR totals (log Pr(1)/Pr(0) scale) per executed iteration.
    pub marginal_llrs: Vec<Vec<f64>>,
    pub hard_decisions: Vec<u8>,
    pub iterations_used: usize,
    pub valid: bool,
    pub messages_final: Vec<f64>,
}

impl DecodeOutput {
    /// Output probabilities o_{v,t} = sigmoid(total) of iteration `t` (0-based).
    pub fn probabilities(&self, t: usize) -> Vec<f64> {
        self.marginal_llrs[t].iter().map(|&x| sigmoid(x)).collect()
    }

    pub fn final_llrs(&self) -> &[f64] {
        self.marginal_llrs.last().expect("at least one iteration")
    }
}

/// Decodes one frame of channel LLRs.
pub fn decode(spec: &DecoderSpec, params: &Parameters, code: &LinearCode, llr: &[f64]) -> Result<DecodeOutput> {
    decode_graph(spec, params, code.graph(), llr)
}

pub fn decode_graph(spec: &DecoderSpec, params: &Parameters, graph: &TannerGraph, llr: &[f64]) -> Result<DecodeOutput> {
    params.check_shapes(spec, graph)?;
    let run = unroll(&mut Plain, spec, graph, params, llr, spec.early_stop)?;
    let hard_decisions = run
        .totals
        .last()
        .expect("iterations ≥ 1")
        .iter()
        .map(|&x| hard_decision(x))
        .collect();
    Ok(DecodeOutput {
        marginal_llrs: run.totals,
        hard_decisions,
        iterations_used: run.iterations_used,
        valid: run.valid,
        messages_final: run.check_messages,
    })
}

/// A spec bound to its parameters and code, validated once.
#[derive(Clone, Debug)]
pub struct Decoder {
    spec: DecoderSpec,
    params: Parameters,
    code: LinearCode,
}

impl Decoder {
    pub fn new(spec: DecoderSpec, params: Parameters, code: LinearCode) -> Result<Self> {
        spec.validate()?;
        params.check_shapes(&spec, code.graph())?;
        Ok(Decoder { spec, params, code })
    }

    /// Classical decoder: default parameters for the spec.
    pub fn with_defaults(spec: DecoderSpec, code: LinearCode) -> Result<Self> {
        let params = Parameters::init(&spec, code.graph());
        Self::new(spec, params, code)
    }

    pub fn spec(&self) -> &DecoderSpec {
        &self.spec
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn decode(&self, llr: &[f64]) -> Result<DecodeOutput> {
        let run = unroll(&mut Plain, &self.spec, self.code.graph(), &self.params, llr, self.spec.early_stop)?;
        let hard_decisions = run.totals.last().expect("iterations ≥ 1").iter().map(|&x| hard_decision(x)).collect();
        Ok(DecodeOutput {
            marginal_llrs: run.totals,
            hard_decisions,
            iterations_used: run.iterations_used,
            valid: run.valid,
            messages_final: run.check_messages,
        })
    }
}
