//! Per-layer message-passing kernels over a Tanner graph.
//!
//! Message vectors are indexed by edge in the graph's canonical order. The
//! generic kernels run on any [`Arith`] backend; the `*_naive` functions are
//! direct per-edge recomputations kept as references for the O(E) paths.

use super::arith::{atanh_odd, clamp_product, Arith};
use crate::code::TannerGraph;
use crate::error::{Error, Result};

/// Variable-side weights on incoming check messages.
#[derive(Clone, Copy, Debug)]
pub enum VarEdgeWeights<'a, V> {
    Unit,
    /// w_{e'} per source edge.
    Source(&'a [V]),
    /// w_{e,e'} per (target, source) pair; `offsets[e]` is the first slot of
    /// target e, whose sources are its variable's other edges, ascending.
    Pair { weights: &'a [V], offsets: &'a [usize] },
}

#[derive(Clone, Copy, Debug)]
pub struct VarSide<'a, V> {
    /// w_v on the channel LLR, or unit.
    pub llr_weights: Option<&'a [V]>,
    pub edges: VarEdgeWeights<'a, V>,
}

impl<V> VarSide<'_, V> {
    pub fn plain() -> Self {
        VarSide {
            llr_weights: None,
            edges: VarEdgeWeights::Unit,
        }
    }
}

/// Scalar or per-edge correction value.
#[derive(Clone, Copy, Debug)]
pub enum EdgeScalars<'a, V> {
    Scalar(V),
    PerEdge(&'a [V]),
}

impl<V: Copy> EdgeScalars<'_, V> {
    #[inline]
    fn at(&self, e: usize) -> V {
        match self {
            EdgeScalars::Scalar(v) => *v,
            EdgeScalars::PerEdge(w) => w[e],
        }
    }
}

/// Min-sum magnitude correction.
#[derive(Clone, Copy, Debug)]
pub enum MinSumCorrection<'a, V> {
    None,
    /// Multiply by a weight (NMS / NNMS).
    Weight(EdgeScalars<'a, V>),
    /// max(|·| − β, 0) (OMS / NOMS).
    Offset(EdgeScalars<'a, V>),
}

/// Domain of the values fed to the sum-product check update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageDomain {
    /// LLR messages; the check applies tanh(·/2) itself.
    Llr,
    /// Already in the tanh(·/2) domain (neural variable layer output).
    Tanh,
}

#[derive(Clone, Copy, Debug)]
pub struct OutSide<'a, V> {
    /// w̃_v on the channel LLR, or unit.
    pub self_weights: Option<&'a [V]>,
    /// w̃_{v,e'} on check messages, or unit.
    pub edge_weights: Option<&'a [V]>,
}

impl<V> OutSide<'_, V> {
    pub fn plain() -> Self {
        OutSide {
            self_weights: None,
            edge_weights: None,
        }
    }
}

fn check_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Shape(format!("{what}: expected length {expected}, got {got}")));
    }
    Ok(())
}

/// Per-variable totals s_v = base_v + Σ_{e'∋v} m_{e'}.
pub fn node_totals<A: Arith>(a: &mut A, graph: &TannerGraph, base: &[A::V], msgs: &[A::V]) -> Vec<A::V> {
    (0..graph.num_vars())
        .map(|v| {
            graph
                .var_edges(v)
                .iter()
                .fold(base[v], |acc, &e| a.add(acc, msgs[e as usize]))
        })
        .collect()
}

/// Extrinsic value on one edge: total minus the edge's own contribution.
#[inline]
pub fn leave_one_out<A: Arith>(a: &mut A, total: A::V, own: A::V) -> A::V {
    a.sub(total, own)
}

/// Variable → check messages, clipped to [−clip, clip]; passed through
/// tanh(·/2) when `tanh_output` is set (sum-product decoders).
#[allow(clippy::too_many_arguments)]
pub fn variable_update<A: Arith>(
    a: &mut A,
    graph: &TannerGraph,
    llr: &[A::V],
    c2v: &[A::V],
    side: &VarSide<'_, A::V>,
    clip: f64,
    tanh_output: bool,
    out: &mut Vec<A::V>,
) -> Result<()> {
    let n_e = graph.num_edges();
    check_len("llr", graph.num_vars(), llr.len())?;
    check_len("check messages", n_e, c2v.len())?;
    let base: Vec<A::V> = match side.llr_weights {
        Some(w) => {
            check_len("llr weights", llr.len(), w.len())?;
            llr.iter().zip(w).map(|(&l, &w)| a.mul(w, l)).collect()
        }
        None => llr.to_vec(),
    };
    out.clear();
    out.resize(n_e, base.first().copied().unwrap_or_else(|| a.constant(0.0)));
    match side.edges {
        VarEdgeWeights::Unit | VarEdgeWeights::Source(_) => {
            let weighted: Vec<A::V> = match side.edges {
                VarEdgeWeights::Source(w) => {
                    check_len("variable weights", n_e, w.len())?;
                    c2v.iter().zip(w).map(|(&x, &w)| a.mul(w, x)).collect()
                }
                _ => c2v.to_vec(),
            };
            let totals = node_totals(a, graph, &base, &weighted);
            for v in 0..graph.num_vars() {
                for &e in graph.var_edges(v) {
                    let e = e as usize;
                    out[e] = leave_one_out(a, totals[v], weighted[e]);
                }
            }
        }
        VarEdgeWeights::Pair { weights, offsets } => {
            check_len("pair weights", graph.num_var_edge_pairs(), weights.len())?;
            for v in 0..graph.num_vars() {
                let edges = graph.var_edges(v);
                for &e in edges {
                    let e = e as usize;
                    let mut acc = base[v];
                    let mut slot = offsets[e];
                    for &src in edges {
                        let src = src as usize;
                        if src == e {
                            continue;
                        }
                        let term = a.mul(weights[slot], c2v[src]);
                        acc = a.add(acc, term);
                        slot += 1;
                    }
                    out[e] = acc;
                }
            }
        }
    }
    for x in out.iter_mut() {
        if clip.is_finite() {
            *x = a.clip(*x, clip);
        }
        if tanh_output {
            *x = a.tanh_half(*x);
        }
    }
    Ok(())
}

/// Check → variable messages 2·atanh(∏_{e'≠e} τ(x_{e'})). Leave-one-out
/// products use prefix/suffix products; degree-1 checks emit 0.
pub fn check_update_sum_product<A: Arith>(
    a: &mut A,
    graph: &TannerGraph,
    inputs: &[A::V],
    domain: MessageDomain,
    out: &mut Vec<A::V>,
) -> Result<()> {
    check_len("variable messages", graph.num_edges(), inputs.len())?;
    let zero = a.constant(0.0);
    out.clear();
    out.resize(graph.num_edges(), zero);
    let mut taus: Vec<A::V> = Vec::new();
    let mut prefix: Vec<A::V> = Vec::new();
    let mut suffix: Vec<A::V> = Vec::new();
    for c in 0..graph.num_checks() {
        let edges = graph.check_edges(c);
        let d = edges.len();
        if d < 2 {
            continue;
        }
        taus.clear();
        for &e in edges {
            let x = inputs[e as usize];
            taus.push(match domain {
                MessageDomain::Llr => a.tanh_half(x),
                MessageDomain::Tanh => x,
            });
        }
        // prefix[i] = τ_0…τ_{i-1} for i ≥ 1; suffix[i] = τ_{i+1}…τ_{d-1} for i ≤ d-2
        prefix.clear();
        prefix.push(zero);
        prefix.push(taus[0]);
        for i in 2..d {
            let p = a.mul(prefix[i - 1], taus[i - 1]);
            prefix.push(p);
        }
        suffix.clear();
        suffix.resize(d, zero);
        suffix[d - 2] = taus[d - 1];
        for i in (0..d.saturating_sub(2)).rev() {
            suffix[i] = a.mul(suffix[i + 1], taus[i + 1]);
        }
        for (i, &e) in edges.iter().enumerate() {
            let prod = if i == 0 {
                suffix[0]
            } else if i == d - 1 {
                prefix[d - 1]
            } else {
                a.mul(prefix[i], suffix[i])
            };
            out[e as usize] = a.atanh_twice(prod);
        }
    }
    Ok(())
}

/// Aggregates of one check used by the O(E) min-sum update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinSumTotals {
    /// Position (within the check's edge list) of the smallest magnitude;
    /// ties resolve to the lowest position.
    pub argmin: usize,
    pub min1: f64,
    /// Smallest magnitude over the other positions.
    pub min2: f64,
    /// True when an odd number of inputs are negative.
    pub negative: bool,
}

pub fn min_sum_totals(magnitudes: impl Iterator<Item = f64>, signs_negative: impl Iterator<Item = bool>) -> MinSumTotals {
    let mut t = MinSumTotals {
        argmin: 0,
        min1: f64::INFINITY,
        min2: f64::INFINITY,
        negative: false,
    };
    for (i, m) in magnitudes.enumerate() {
        if m < t.min1 {
            t.min2 = t.min1;
            t.min1 = m;
            t.argmin = i;
        } else if m < t.min2 {
            t.min2 = m;
        }
    }
    t.negative = signs_negative.fold(false, |acc, s| acc ^ s);
    t
}

/// Min-sum check → variable messages with optional NMS/NNMS weights or
/// OMS/NOMS offsets and a fixed post-scale. Degree-1 checks emit 0.
pub fn check_update_min_sum<A: Arith>(
    a: &mut A,
    graph: &TannerGraph,
    inputs: &[A::V],
    correction: &MinSumCorrection<'_, A::V>,
    post_scale: Option<f64>,
    out: &mut Vec<A::V>,
) -> Result<()> {
    let n_e = graph.num_edges();
    check_len("variable messages", n_e, inputs.len())?;
    match correction {
        MinSumCorrection::Weight(EdgeScalars::PerEdge(w)) | MinSumCorrection::Offset(EdgeScalars::PerEdge(w)) => {
            check_len("min-sum corrections", n_e, w.len())?;
        }
        _ => {}
    }
    let zero = a.constant(0.0);
    let scale = post_scale.unwrap_or(1.0);
    out.clear();
    out.resize(n_e, zero);
    let mut mags: Vec<A::V> = Vec::new();
    for c in 0..graph.num_checks() {
        let edges = graph.check_edges(c);
        let d = edges.len();
        if d < 2 {
            continue;
        }
        mags.clear();
        for &e in edges {
            let m = a.abs(inputs[e as usize]);
            mags.push(m);
        }
        let t = min_sum_totals(
            mags.iter().map(|&m| a.value(m)),
            edges.iter().map(|&e| a.value(inputs[e as usize]) < 0.0),
        );
        // index of the second smallest magnitude (first position ≠ argmin attaining min2)
        let second = (0..d)
            .filter(|&i| i != t.argmin)
            .find(|&i| a.value(mags[i]) == t.min2)
            .expect("degree ≥ 2");
        for (i, &e) in edges.iter().enumerate() {
            let e = e as usize;
            let m = if i == t.argmin { mags[second] } else { mags[t.argmin] };
            let own_negative = a.value(inputs[e]) < 0.0;
            let sign = if t.negative ^ own_negative { -1.0 } else { 1.0 };
            let corrected = match correction {
                MinSumCorrection::None => m,
                MinSumCorrection::Weight(w) => a.mul(w.at(e), m),
                MinSumCorrection::Offset(b) => {
                    let shifted = a.sub(m, b.at(e));
                    a.relu(shifted)
                }
            };
            out[e] = a.scale(corrected, sign * scale);
        }
    }
    Ok(())
}

/// Relaxation filter state: the previous filtered check messages.
#[derive(Clone, Debug, Default)]
pub struct RelaxState<V> {
    pub previous_filtered: Option<Vec<V>>,
}

impl<V> RelaxState<V> {
    pub fn new() -> Self {
        RelaxState {
            previous_filtered: None,
        }
    }
}

/// m'_t = γ m'_{t−1} + (1 − γ) m_t in place. The first call only records
/// the raw messages (warm start), so the first iteration passes through.
/// `gamma` and `one_minus_gamma` hold one value or one per edge.
pub fn relax_in_place<A: Arith>(
    a: &mut A,
    messages: &mut [A::V],
    state: &mut RelaxState<A::V>,
    gamma: &[A::V],
    one_minus_gamma: &[A::V],
) {
    if let Some(prev) = state.previous_filtered.as_mut() {
        for (e, (m, p)) in messages.iter_mut().zip(prev.iter_mut()).enumerate() {
            let (g, h) = if gamma.len() == 1 {
                (gamma[0], one_minus_gamma[0])
            } else {
                (gamma[e], one_minus_gamma[e])
            };
            let kept = a.mul(g, *p);
            let fresh = a.mul(h, *m);
            *m = a.add(kept, fresh);
            *p = *m;
        }
    } else {
        state.previous_filtered = Some(messages.to_vec());
    }
}

/// Plain relaxation step with range checking of γ ∈ [0, 1).
pub fn relax(new_messages: &[f64], state: &mut RelaxState<f64>, gamma: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("relaxation factor {gamma} outside [0, 1)")));
    }
    if let Some(prev) = &state.previous_filtered {
        check_len("relaxation state", prev.len(), new_messages.len())?;
    }
    let mut out = new_messages.to_vec();
    relax_in_place(&mut super::arith::Plain, &mut out, state, &[gamma], &[1.0 - gamma]);
    Ok(out)
}

/// Marginal LLR totals o_v = w̃_v l_v + Σ_{e'∋v} w̃_{e'} x_{e'} (unit weights
/// when absent). Neural decoders report sigmoid of this value.
pub fn marginalize<A: Arith>(
    a: &mut A,
    graph: &TannerGraph,
    llr: &[A::V],
    c2v: &[A::V],
    side: &OutSide<'_, A::V>,
    out: &mut Vec<A::V>,
) -> Result<()> {
    check_len("llr", graph.num_vars(), llr.len())?;
    check_len("check messages", graph.num_edges(), c2v.len())?;
    out.clear();
    for v in 0..graph.num_vars() {
        let mut acc = match side.self_weights {
            Some(w) => a.mul(w[v], llr[v]),
            None => llr[v],
        };
        for &e in graph.var_edges(v) {
            let e = e as usize;
            let term = match side.edge_weights {
                Some(w) => a.mul(w[e], c2v[e]),
                None => c2v[e],
            };
            acc = a.add(acc, term);
        }
        out.push(acc);
    }
    Ok(())
}

/// Reference: x_e = l_v + Σ_{e'∋v, e'≠e} m_{e'} summed directly per edge.
pub fn variable_update_naive(graph: &TannerGraph, llr: &[f64], c2v: &[f64]) -> Vec<f64> {
    (0..graph.num_edges())
        .map(|e| {
            let v = graph.edge_var(e);
            llr[v]
                + graph
                    .var_edges(v)
                    .iter()
                    .filter(|&&f| f as usize != e)
                    .map(|&f| c2v[f as usize])
                    .sum::<f64>()
        })
        .collect()
}

/// Reference min-sum: per edge, minimum magnitude and sign product over the
/// other edges of its check.
pub fn check_update_min_sum_naive(graph: &TannerGraph, v2c: &[f64]) -> Vec<f64> {
    (0..graph.num_edges())
        .map(|e| {
            let c = graph.edge_check(e);
            let others = graph.check_edges(c).iter().map(|&f| f as usize).filter(|&f| f != e);
            let mut min = f64::INFINITY;
            let mut negative = false;
            let mut any = false;
            for f in others {
                any = true;
                min = min.min(v2c[f].abs());
                negative ^= v2c[f] < 0.0;
            }
            if !any {
                0.0
            } else if negative {
                -min
            } else {
                min
            }
        })
        .collect()
}

/// Reference sum-product check update with LLR inputs, one product per edge.
pub fn check_update_sum_product_naive(graph: &TannerGraph, v2c: &[f64]) -> Vec<f64> {
    (0..graph.num_edges())
        .map(|e| {
            let c = graph.edge_check(e);
            if graph.check_degree(c) < 2 {
                return 0.0;
            }
            let prod: f64 = graph
                .check_edges(c)
                .iter()
                .map(|&f| f as usize)
                .filter(|&f| f != e)
                .map(|f| (0.5 * v2c[f]).tanh())
                .product();
            2.0 * atanh_odd(clamp_product(prod))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::arith::Plain;
    use super::*;
    use crate::code::{builtin, BinaryMatrix, TannerGraph};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn single_check(d: usize) -> TannerGraph {
        TannerGraph::build(&BinaryMatrix::from_dense(1, d, &vec![1; d]).unwrap())
    }

    #[test]
    fn first_layer_broadcasts_llr() {
        let code = builtin("hamming74").unwrap().code;
        let g = code.graph();
        let llr = [0.3, -1.0, 2.0, 0.0, 1.5, -0.7, 0.9];
        let mut out = Vec::new();
        variable_update(&mut Plain, g, &llr, &vec![0.0; g.num_edges()], &VarSide::plain(), f64::INFINITY, false, &mut out)
            .unwrap();
        for e in 0..g.num_edges() {
            assert_eq!(out[e], llr[g.edge_var(e)]);
        }
    }

    #[test]
    fn leave_one_out_degree_three() {
        // variable 0 attached to three checks
        let h = BinaryMatrix::from_dense(3, 2, &[1, 1, 1, 0, 1, 1]).unwrap();
        let g = TannerGraph::build(&h);
        let edges: Vec<usize> = g.var_edges(0).iter().map(|&e| e as usize).collect();
        let mut c2v = vec![0.0; g.num_edges()];
        for (e, m) in edges.iter().zip([2.0, -1.0, 0.5]) {
            c2v[*e] = m;
        }
        let mut out = Vec::new();
        variable_update(&mut Plain, &g, &[1.0, 0.0], &c2v, &VarSide::plain(), f64::INFINITY, false, &mut out).unwrap();
        assert_relative_eq!(out[edges[0]], 0.5);
        assert_relative_eq!(out[edges[1]], 3.5);
        assert_relative_eq!(out[edges[2]], 2.0);
    }

    #[test]
    fn clipping_bounds_messages() {
        let g = single_check(3);
        let mut out = Vec::new();
        variable_update(&mut Plain, &g, &[25.0, -40.0, 3.0], &[0.0; 3], &VarSide::plain(), 10.0, false, &mut out).unwrap();
        assert_eq!(out, vec![10.0, -10.0, 3.0]);
    }

    #[test]
    fn sum_product_check_values() {
        let g2 = single_check(2);
        let mut out = Vec::new();
        check_update_sum_product(&mut Plain, &g2, &[2.0, 7.0], MessageDomain::Llr, &mut out).unwrap();
        assert_relative_eq!(out[0], 7.0, epsilon = 1e-9);
        assert_relative_eq!(out[1], 2.0, epsilon = 1e-12);

        let g3 = single_check(3);
        check_update_sum_product(&mut Plain, &g3, &[0.3, 2.0, 2.0], MessageDomain::Llr, &mut out).unwrap();
        let expected = 2.0 * ((1.0f64).tanh().powi(2)).atanh();
        assert_relative_eq!(out[0], expected, epsilon = 1e-12);
        assert_relative_eq!(out[0], 1.325003, epsilon = 1e-6);

        check_update_sum_product(&mut Plain, &g3, &[0.3, 0.0, 2.0], MessageDomain::Llr, &mut out).unwrap();
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2], 0.0);

        let g1 = single_check(1);
        check_update_sum_product(&mut Plain, &g1, &[4.0], MessageDomain::Llr, &mut out).unwrap();
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn min_sum_variants() {
        let g = single_check(4);
        let inputs = [9.0, 1.5, -0.5, 2.0];
        let mut out = Vec::new();
        check_update_min_sum(&mut Plain, &g, &inputs, &MinSumCorrection::None, None, &mut out).unwrap();
        assert_eq!(out[0], -0.5);
        check_update_min_sum(&mut Plain, &g, &inputs, &MinSumCorrection::Offset(EdgeScalars::Scalar(0.5)), None, &mut out)
            .unwrap();
        assert_eq!(out[0], 0.0);
        check_update_min_sum(&mut Plain, &g, &inputs, &MinSumCorrection::Weight(EdgeScalars::Scalar(0.8)), None, &mut out)
            .unwrap();
        assert_relative_eq!(out[0], -0.4);
        check_update_min_sum(&mut Plain, &g, &inputs, &MinSumCorrection::None, Some(0.5), &mut out).unwrap();
        assert_eq!(out[0], -0.25);
        // the argmin edge receives the second minimum
        check_update_min_sum(&mut Plain, &g, &inputs, &MinSumCorrection::None, None, &mut out).unwrap();
        assert_eq!(out[2], 1.5);

        let g1 = single_check(1);
        check_update_min_sum(&mut Plain, &g1, &[3.0], &MinSumCorrection::None, None, &mut out).unwrap();
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn relax_behaviour() {
        let mut st = RelaxState::new();
        assert_eq!(relax(&[8.0], &mut st, 0.875).unwrap(), vec![8.0]);
        let mut st = RelaxState {
            previous_filtered: Some(vec![0.0]),
        };
        assert_eq!(relax(&[8.0], &mut st, 0.875).unwrap(), vec![1.0]);
        assert_eq!(st.previous_filtered, Some(vec![1.0]));
        let mut st = RelaxState {
            previous_filtered: Some(vec![3.0, -2.0]),
        };
        assert_eq!(relax(&[0.25, 7.0], &mut st, 0.0).unwrap(), vec![0.25, 7.0]);
        let mut st = RelaxState::new();
        for _ in 0..10 {
            assert_relative_eq!(relax(&[4.0], &mut st, 0.6).unwrap()[0], 4.0);
        }
        assert!(relax(&[1.0], &mut RelaxState::new(), 1.0).is_err());
        assert!(relax(&[1.0], &mut RelaxState::new(), -0.1).is_err());
    }

    #[test]
    fn marginalize_plain() {
        let code = builtin("hamming74").unwrap().code;
        let g = code.graph();
        let llr = [0.3, -1.0, 2.0, 0.0, 1.5, -0.7, 0.9];
        let mut out = Vec::new();
        marginalize(&mut Plain, g, &llr, &vec![0.0; g.num_edges()], &OutSide::plain(), &mut out).unwrap();
        assert_eq!(out, llr.to_vec());
    }

    #[test]
    fn degree_one_variable() {
        let g = TannerGraph::build(&BinaryMatrix::identity(3).unwrap());
        let naive = variable_update_naive(&g, &[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]);
        assert_eq!(naive, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn shape_errors() {
        let g = single_check(3);
        let mut out = Vec::new();
        assert!(variable_update(&mut Plain, &g, &[1.0], &[0.0; 3], &VarSide::plain(), 10.0, false, &mut out).is_err());
        assert!(check_update_min_sum(&mut Plain, &g, &[1.0; 2], &MinSumCorrection::None, None, &mut out).is_err());
    }

    proptest! {
        #[test]
        fn totals_match_naive(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let code = builtin("bch_15_11").unwrap().code;
            let g = code.graph();
            let llr: Vec<f64> = (0..15).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let c2v: Vec<f64> = (0..g.num_edges()).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let mut fast = Vec::new();
            variable_update(&mut Plain, g, &llr, &c2v, &VarSide::plain(), f64::INFINITY, false, &mut fast).unwrap();
            let slow = variable_update_naive(g, &llr, &c2v);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
            let mut ms = Vec::new();
            check_update_min_sum(&mut Plain, g, &c2v, &MinSumCorrection::None, None, &mut ms).unwrap();
            prop_assert_eq!(ms, check_update_min_sum_naive(g, &c2v));
            let mut sp = Vec::new();
            check_update_sum_product(&mut Plain, g, &c2v, MessageDomain::Llr, &mut sp).unwrap();
            for (a, b) in sp.iter().zip(&check_update_sum_product_naive(g, &c2v)) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }
    }
}
