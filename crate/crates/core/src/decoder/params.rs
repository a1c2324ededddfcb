//! Learnable tensors of a decoder and their on-disk format.
//!
//! Bundle format (text, line oriented):
//!
//! ```text
//! neurodec-params 1
//! code_id = <id>
//! h_sha256 = <hex>
//! spec = <canonical decoder descriptor>
//! group <name> <layers> <per_layer>
//! <per_layer values>            (repeated <layers> times, space separated)
//! ...                           (groups in ParamGroup::ALL order, empty ones omitted)
//! end
//! ```
//!
//! Values use Rust's shortest round-trip float formatting (`inf`/`-inf` allowed).

use std::fmt::Write as _;

use super::spec::{CheckRule, DecoderSpec, EdgeIndexing, Relaxation, WeightMode};
use crate::code::TannerGraph;
use crate::error::{Error, Result};

/// Parameter groups in flat layout order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamGroup {
    /// Neural BP variable-side weights on incoming check messages.
    VarWeights,
    /// Neural BP marginalization weights on check messages.
    OutWeights,
    /// Neural BP weight on the channel LLR in the variable update (w_v).
    LlrWeights,
    /// Neural BP weight on the channel LLR in marginalization (w̃_v).
    SelfOutWeights,
    /// Min-sum multiplicative weights (NMS scalar or NNMS per edge).
    CheckWeights,
    /// Min-sum offsets (OMS scalar or NOMS per edge).
    Offsets,
    /// Unconstrained relaxation parameter(s); γ = sigmoid(gamma_raw).
    GammaRaw,
}

impl ParamGroup {
    pub const ALL: [ParamGroup; 7] = [
        ParamGroup::VarWeights,
        ParamGroup::OutWeights,
        ParamGroup::LlrWeights,
        ParamGroup::SelfOutWeights,
        ParamGroup::CheckWeights,
        ParamGroup::Offsets,
        ParamGroup::GammaRaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamGroup::VarWeights => "var_weights",
            ParamGroup::OutWeights => "out_weights",
            ParamGroup::LlrWeights => "llr_weights",
            ParamGroup::SelfOutWeights => "self_out_weights",
            ParamGroup::CheckWeights => "check_weights",
            ParamGroup::Offsets => "offsets",
            ParamGroup::GammaRaw => "gamma_raw",
        }
    }

    pub fn from_name(name: &str) -> Option<ParamGroup> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }

    /// Initial value: weights 1, offsets 0, gamma_raw 0 (γ = ½).
    pub fn init_value(self) -> f64 {
        match self {
            ParamGroup::Offsets | ParamGroup::GammaRaw => 0.0,
            _ => 1.0,
        }
    }
}

/// (layers, per-layer length) of each group for a spec on a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub layers: usize,
    pub per_layer: usize,
}

impl Shape {
    pub const EMPTY: Shape = Shape { layers: 0, per_layer: 0 };

    pub fn len(&self) -> usize {
        self.layers * self.per_layer
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn group_shape(spec: &DecoderSpec, graph: &TannerGraph, group: ParamGroup) -> Shape {
    let e = graph.num_edges();
    let layers = spec.layers();
    let neural_bp = spec.is_neural_bp();
    let min_sum = spec.check_rule == CheckRule::MinSum;
    match group {
        ParamGroup::VarWeights if neural_bp => Shape {
            layers,
            per_layer: match spec.indexing {
                EdgeIndexing::Source => e,
                EdgeIndexing::Pair => graph.num_var_edge_pairs(),
            },
        },
        ParamGroup::OutWeights if neural_bp => Shape { layers, per_layer: e },
        ParamGroup::LlrWeights | ParamGroup::SelfOutWeights if neural_bp => Shape {
            layers: 1,
            per_layer: graph.num_vars(),
        },
        ParamGroup::CheckWeights if min_sum => match spec.weight_mode {
            WeightMode::ScalarWeight => Shape { layers: 1, per_layer: 1 },
            WeightMode::PerEdgeWeight => Shape { layers, per_layer: e },
            _ => Shape::EMPTY,
        },
        ParamGroup::Offsets if min_sum => match spec.weight_mode {
            WeightMode::ScalarOffset => Shape { layers: 1, per_layer: 1 },
            WeightMode::PerEdgeOffset => Shape { layers, per_layer: e },
            _ => Shape::EMPTY,
        },
        ParamGroup::GammaRaw => match spec.relaxation {
            Relaxation::Off => Shape::EMPTY,
            Relaxation::On { per_edge: false } => Shape { layers: 1, per_layer: 1 },
            Relaxation::On { per_edge: true } => Shape { layers: 1, per_layer: e },
        },
        _ => Shape::EMPTY,
    }
}

/// One tensor per group, row-major (layer, index). Generic so the same layout
/// holds plain values, tape handles or gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<T> {
    pub var_weights: Vec<T>,
    pub out_weights: Vec<T>,
    pub llr_weights: Vec<T>,
    pub self_out_weights: Vec<T>,
    pub check_weights: Vec<T>,
    pub offsets: Vec<T>,
    pub gamma_raw: Vec<T>,
}

/// Plain parameter values.
pub type Parameters = ParamSet<f64>;

impl<T> ParamSet<T> {
    pub fn group(&self, g: ParamGroup) -> &Vec<T> {
        match g {
            ParamGroup::VarWeights => &self.var_weights,
            ParamGroup::OutWeights => &self.out_weights,
            ParamGroup::LlrWeights => &self.llr_weights,
            ParamGroup::SelfOutWeights => &self.self_out_weights,
            ParamGroup::CheckWeights => &self.check_weights,
            ParamGroup::Offsets => &self.offsets,
            ParamGroup::GammaRaw => &self.gamma_raw,
        }
    }

    pub fn group_mut(&mut self, g: ParamGroup) -> &mut Vec<T> {
        match g {
            ParamGroup::VarWeights => &mut self.var_weights,
            ParamGroup::OutWeights => &mut self.out_weights,
            ParamGroup::LlrWeights => &mut self.llr_weights,
            ParamGroup::SelfOutWeights => &mut self.self_out_weights,
            ParamGroup::CheckWeights => &mut self.check_weights,
            ParamGroup::Offsets => &mut self.offsets,
            ParamGroup::GammaRaw => &mut self.gamma_raw,
        }
    }

    /// Builds a set by calling `f(group)` for each group.
    pub fn from_fn(mut f: impl FnMut(ParamGroup) -> Vec<T>) -> Self {
        ParamSet {
            var_weights: f(ParamGroup::VarWeights),
            out_weights: f(ParamGroup::OutWeights),
            llr_weights: f(ParamGroup::LlrWeights),
            self_out_weights: f(ParamGroup::SelfOutWeights),
            check_weights: f(ParamGroup::CheckWeights),
            offsets: f(ParamGroup::Offsets),
            gamma_raw: f(ParamGroup::GammaRaw),
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(ParamGroup, usize, &T) -> U) -> ParamSet<U> {
        ParamSet::from_fn(|g| self.group(g).iter().enumerate().map(|(i, x)| f(g, i, x)).collect())
    }

    pub fn total_len(&self) -> usize {
        ParamGroup::ALL.iter().map(|&g| self.group(g).len()).sum()
    }

    /// Values in flat layout order.
    pub fn iter_flat(&self) -> impl Iterator<Item = (ParamGroup, &T)> {
        ParamGroup::ALL
            .into_iter()
            .flat_map(move |g| self.group(g).iter().map(move |x| (g, x)))
    }
}

impl<T: Copy> ParamSet<T> {
    pub fn flatten(&self) -> Vec<T> {
        self.iter_flat().map(|(_, &x)| x).collect()
    }
}

impl Parameters {
    /// Initial parameters for a spec: classical decoder behavior.
    pub fn init(spec: &DecoderSpec, graph: &TannerGraph) -> Parameters {
        ParamSet::from_fn(|g| vec![g.init_value(); group_shape(spec, graph, g).len()])
    }

    pub fn zeros_like(&self) -> Parameters {
        self.map(|_, _, _| 0.0)
    }

    /// Overwrites values from a flat vector in layout order.
    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.total_len() {
            return Err(Error::Length {
                expected: self.total_len(),
                got: flat.len(),
            });
        }
        let mut it = flat.iter();
        for g in ParamGroup::ALL {
            for x in self.group_mut(g) {
                *x = *it.next().expect("length checked");
            }
        }
        Ok(())
    }

    pub fn fill(&mut self, group: ParamGroup, value: f64) {
        self.group_mut(group).iter_mut().for_each(|x| *x = value);
    }

    /// Relaxation factors γ = sigmoid(gamma_raw).
    pub fn gamma(&self) -> Vec<f64> {
        self.gamma_raw.iter().map(|&r| super::arith::sigmoid(r)).collect()
    }

    pub fn check_shapes(&self, spec: &DecoderSpec, graph: &TannerGraph) -> Result<()> {
        for g in ParamGroup::ALL {
            let want = group_shape(spec, graph, g).len();
            let got = self.group(g).len();
            if want != got {
                return Err(Error::Shape(format!("{} has {got} values, spec needs {want}", g.name())));
            }
        }
        if let Some(x) = self.iter_flat().find(|(g, x)| x.is_nan() || (x.is_infinite() && *g != ParamGroup::GammaRaw)) {
            return Err(Error::InvalidArgument(format!("non-finite parameter in {}", x.0.name())));
        }
        Ok(())
    }

    /// Keeps the first `layers` layers of every per-layer group (used to run a
    /// feed-forward decoder for fewer iterations than it was trained with).
    pub fn truncate_layers(&self, spec: &DecoderSpec, graph: &TannerGraph, layers: usize) -> Parameters {
        ParamSet::from_fn(|g| {
            let shape = group_shape(spec, graph, g);
            let v = self.group(g);
            if shape.layers > 1 {
                v[..layers.min(shape.layers) * shape.per_layer].to_vec()
            } else {
                v.clone()
            }
        })
    }
}

/// Parameters together with the spec and code identity they were trained for.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamBundle {
    pub code_id: String,
    pub h_sha256: String,
    pub spec: DecoderSpec,
    pub params: Parameters,
}

const MAGIC: &str = "neurodec-params 1";

impl ParamBundle {
    pub fn to_text(&self, graph: &TannerGraph) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "code_id = {}", self.code_id);
        let _ = writeln!(out, "h_sha256 = {}", self.h_sha256);
        let _ = writeln!(out, "spec = {}", self.spec);
        for g in ParamGroup::ALL {
            let shape = group_shape(&self.spec, graph, g);
            let values = self.params.group(g);
            if values.is_empty() {
                continue;
            }
            let _ = writeln!(out, "group {} {} {}", g.name(), shape.layers, shape.per_layer);
            for layer in values.chunks(shape.per_layer.max(1)) {
                let line: Vec<String> = layer.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        let _ = writeln!(out, "end");
        out
    }

    /// Parses a bundle and checks its shapes against the graph.
    pub fn from_text(text: &str, graph: &TannerGraph) -> Result<ParamBundle> {
        let perr = |line: usize, msg: &str| Error::Parse(format!("parameter bundle line {line}: {msg}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            Some((n, _)) => return Err(perr(n, "missing 'neurodec-params 1' header")),
            None => return Err(perr(1, "empty input")),
        }
        let mut header = |key: &str| -> Result<String> {
            let (n, l) = lines.next().ok_or_else(|| perr(0, "truncated header"))?;
            let (k, v) = l.split_once('=').ok_or_else(|| perr(n, "expected key = value"))?;
            if k.trim() != key {
                return Err(perr(n, &format!("expected key '{key}'")));
            }
            Ok(v.trim().to_string())
        };
        let code_id = header("code_id")?;
        let h_sha256 = header("h_sha256")?;
        let spec: DecoderSpec = header("spec")?.parse()?;
        let mut params = Parameters::init(&spec, graph);
        for g in ParamGroup::ALL {
            params.group_mut(g).clear();
        }
        loop {
            let (n, l) = lines.next().ok_or_else(|| perr(0, "missing 'end'"))?;
            if l == "end" {
                break;
            }
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "group" {
                return Err(perr(n, "expected 'group <name> <layers> <per_layer>'"));
            }
            let g = ParamGroup::from_name(fields[1]).ok_or_else(|| perr(n, "unknown group"))?;
            let layers: usize = fields[2].parse().map_err(|_| perr(n, "bad layer count"))?;
            let per_layer: usize = fields[3].parse().map_err(|_| perr(n, "bad per-layer count"))?;
            let want = group_shape(&spec, graph, g);
            if want != (Shape { layers, per_layer }) {
                return Err(perr(n, &format!("group {} shape {layers}x{per_layer} does not match spec", g.name())));
            }
            let dst = params.group_mut(g);
            for _ in 0..layers {
                let (n, l) = lines.next().ok_or_else(|| perr(n, "truncated group"))?;
                let row: Vec<f64> = l
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|_| perr(n, &format!("invalid number '{t}'"))))
                    .collect::<Result<_>>()?;
                if row.len() != per_layer {
                    return Err(perr(n, &format!("expected {per_layer} values, found {}", row.len())));
                }
                dst.extend(row);
            }
        }
        params.check_shapes(&spec, graph)?;
        Ok(ParamBundle {
            code_id,
            h_sha256,
            spec,
            params,
        })
    }
}
