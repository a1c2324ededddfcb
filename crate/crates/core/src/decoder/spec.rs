use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default clip bound on variable-node outputs.
pub const DEFAULT_CLIP: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckRule {
    SumProduct,
    MinSum,
}

/// Where learnable scalars sit. For sum-product the per-edge weights act on
/// the variable side (neural BP); for min-sum every mode acts on the check
/// output (NMS, OMS, NNMS, NOMS).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    None,
    ScalarWeight,
    ScalarOffset,
    PerEdgeWeight,
    PerEdgeOffset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tying {
    /// One parameter set per unrolled iteration.
    FeedForward,
    /// One parameter set shared by every iteration.
    Recurrent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relaxation {
    Off,
    On { per_edge: bool },
}

/// Indexing of the variable-side weights of neural sum-product decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeIndexing {
    /// One weight per incoming edge e', shared by all targets (O(E) update).
    Source,
    /// One weight per ordered (target e, source e') pair at a variable.
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderSpec {
    pub check_rule: CheckRule,
    pub weight_mode: WeightMode,
    pub tying: Tying,
    pub relaxation: Relaxation,
    pub iterations: usize,
    pub clip: f64,
    pub early_stop: bool,
    pub fixed_post_scale: Option<f64>,
    pub indexing: EdgeIndexing,
}

impl DecoderSpec {
    pub fn new(check_rule: CheckRule, weight_mode: WeightMode, tying: Tying, iterations: usize) -> Self {
        DecoderSpec {
            check_rule,
            weight_mode,
            tying,
            relaxation: Relaxation::Off,
            iterations,
            clip: DEFAULT_CLIP,
            early_stop: false,
            fixed_post_scale: None,
            indexing: EdgeIndexing::Source,
        }
    }

    pub fn plain_bp(iterations: usize) -> Self {
        Self::new(CheckRule::SumProduct, WeightMode::None, Tying::Recurrent, iterations)
    }

    pub fn min_sum(iterations: usize) -> Self {
        Self::new(CheckRule::MinSum, WeightMode::None, Tying::Recurrent, iterations)
    }

    pub fn with_relaxation(mut self, per_edge: bool) -> Self {
        self.relaxation = Relaxation::On { per_edge };
        self
    }

    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    pub fn with_clip(mut self, clip: f64) -> Self {
        self.clip = clip;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_post_scale(mut self, scale: f64) -> Self {
        self.fixed_post_scale = Some(scale);
        self
    }

    pub fn with_indexing(mut self, indexing: EdgeIndexing) -> Self {
        self.indexing = indexing;
        self
    }

    /// Named decoder families.
    pub fn preset(name: &str, iterations: usize) -> Result<Self> {
        use CheckRule::*;
        use Tying::*;
        use WeightMode::*;
        let s = match name {
            "bp" => Self::new(SumProduct, None, Recurrent, iterations),
            "bp-ff" => Self::new(SumProduct, PerEdgeWeight, FeedForward, iterations),
            "bp-rnn" => Self::new(SumProduct, PerEdgeWeight, Recurrent, iterations),
            "ms" => Self::new(MinSum, None, Recurrent, iterations),
            "nms" => Self::new(MinSum, ScalarWeight, Recurrent, iterations),
            "oms" => Self::new(MinSum, ScalarOffset, Recurrent, iterations),
            "nnms-ff" => Self::new(MinSum, PerEdgeWeight, FeedForward, iterations),
            "nnms-rnn" => Self::new(MinSum, PerEdgeWeight, Recurrent, iterations),
            "noms-ff" => Self::new(MinSum, PerEdgeOffset, FeedForward, iterations),
            "noms-rnn" => Self::new(MinSum, PerEdgeOffset, Recurrent, iterations),
            "relaxed-bp" => Self::new(SumProduct, None, Recurrent, iterations).with_relaxation(false),
            "relaxed-ms" => Self::new(MinSum, None, Recurrent, iterations).with_relaxation(false),
            "relaxed-noms" => Self::new(MinSum, PerEdgeOffset, Recurrent, iterations).with_relaxation(false),
            "mrrd-noms" => Self::new(MinSum, PerEdgeOffset, Recurrent, iterations).with_post_scale(0.5),
            other => return Err(Error::InvalidArgument(format!("unknown decoder preset '{other}'"))),
        };
        Ok(s)
    }

    /// Number of parameter layers: T for feed-forward, 1 for recurrent.
    pub fn layers(&self) -> usize {
        match self.tying {
            Tying::FeedForward => self.iterations,
            Tying::Recurrent => 1,
        }
    }

    #[inline]
    pub fn layer_of(&self, iteration: usize) -> usize {
        match self.tying {
            Tying::FeedForward => iteration,
            Tying::Recurrent => 0,
        }
    }

    /// Neural sum-product: variable-side and marginalization weights exist.
    pub fn is_neural_bp(&self) -> bool {
        self.check_rule == CheckRule::SumProduct && self.weight_mode == WeightMode::PerEdgeWeight
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be at least 1".into()));
        }
        if !(self.clip > 0.0) {
            return Err(Error::InvalidArgument(format!("clip must be positive, got {}", self.clip)));
        }
        if self.check_rule == CheckRule::SumProduct
            && !matches!(self.weight_mode, WeightMode::None | WeightMode::PerEdgeWeight)
        {
            return Err(Error::InvalidArgument(format!(
                "weight mode {:?} requires the min-sum check rule",
                self.weight_mode
            )));
        }
        if self.fixed_post_scale.is_some() && self.check_rule != CheckRule::MinSum {
            return Err(Error::InvalidArgument("fixed post-scale applies to min-sum only".into()));
        }
        if let Some(s) = self.fixed_post_scale {
            if !s.is_finite() {
                return Err(Error::InvalidArgument("post-scale must be finite".into()));
            }
        }
        Ok(())
    }
}

fn rule_name(r: CheckRule) -> &'static str {
    match r {
        CheckRule::SumProduct => "sum_product",
        CheckRule::MinSum => "min_sum",
    }
}

fn mode_name(m: WeightMode) -> &'static str {
    match m {
        WeightMode::None => "none",
        WeightMode::ScalarWeight => "scalar_weight",
        WeightMode::ScalarOffset => "scalar_offset",
        WeightMode::PerEdgeWeight => "per_edge_weight",
        WeightMode::PerEdgeOffset => "per_edge_offset",
    }
}

/// Canonical descriptor: comma-separated `key=value` pairs.
impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={},weights={},tying={},relax={},iterations={},clip={},early_stop={},post_scale={},indexing={}",
            rule_name(self.check_rule),
            mode_name(self.weight_mode),
            match self.tying {
                Tying::FeedForward => "ff",
                Tying::Recurrent => "rnn",
            },
            match self.relaxation {
                Relaxation::Off => "off",
                Relaxation::On { per_edge: false } => "single",
                Relaxation::On { per_edge: true } => "per_edge",
            },
            self.iterations,
            self.clip,
            self.early_stop as u8,
            self.fixed_post_scale.map_or("none".to_string(), |s| s.to_string()),
            match self.indexing {
                EdgeIndexing::Source => "source",
                EdgeIndexing::Pair => "pair",
            },
        )
    }
}

/// Accepts a preset name, a canonical descriptor, or a preset followed by
/// overrides (`bp-rnn,iterations=3`). Iterations default to 5.
impl FromStr for DecoderSpec {
    type Err = Error;

    fn from_str(desc: &str) -> Result<Self> {
        let bad = |k: &str, v: &str| Error::Parse(format!("invalid value '{v}' for decoder key '{k}'"));
        let mut parts = desc.split(',').map(str::trim).filter(|p| !p.is_empty()).peekable();
        let mut spec = match parts.peek() {
            Some(first) if !first.contains('=') => {
                let s = DecoderSpec::preset(first, 5)?;
                parts.next();
                s
            }
            _ => DecoderSpec::plain_bp(5),
        };
        for part in parts {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in decoder descriptor, got '{part}'")))?;
            match k {
                "preset" => {
                    spec = DecoderSpec::preset(v, spec.iterations)?;
                }
                "check" => {
                    spec.check_rule = match v {
                        "sum_product" | "sp" => CheckRule::SumProduct,
                        "min_sum" | "ms" => CheckRule::MinSum,
                        _ => return Err(bad(k, v)),
                    }
                }
                "weights" => {
                    spec.weight_mode = match v {
                        "none" => WeightMode::None,
                        "scalar_weight" => WeightMode::ScalarWeight,
                        "scalar_offset" => WeightMode::ScalarOffset,
                        "per_edge_weight" => WeightMode::PerEdgeWeight,
                        "per_edge_offset" => WeightMode::PerEdgeOffset,
                        _ => return Err(bad(k, v)),
                    }
                }
                "tying" => {
                    spec.tying = match v {
                        "ff" | "feed_forward" => Tying::FeedForward,
                        "rnn" | "recurrent" => Tying::Recurrent,
                        _ => return Err(bad(k, v)),
                    }
                }
                "relax" => {
                    spec.relaxation = match v {
                        "off" => Relaxation::Off,
                        "single" | "on" => Relaxation::On { per_edge: false },
                        "per_edge" => Relaxation::On { per_edge: true },
                        _ => return Err(bad(k, v)),
                    }
                }
                "iterations" => spec.iterations = v.parse().map_err(|_| bad(k, v))?,
                "clip" => spec.clip = v.parse().map_err(|_| bad(k, v))?,
                "early_stop" => {
                    spec.early_stop = match v {
                        "1" | "true" | "on" => true,
                        "0" | "false" | "off" => false,
                        _ => return Err(bad(k, v)),
                    }
                }
                "post_scale" => {
                    spec.fixed_post_scale = match v {
                        "none" => None,
                        _ => Some(v.parse().map_err(|_| bad(k, v))?),
                    }
                }
                "indexing" => {
                    spec.indexing = match v {
                        "source" => EdgeIndexing::Source,
                        "pair" => EdgeIndexing::Pair,
                        _ => return Err(bad(k, v)),
                    }
                }
                _ => return Err(Error::Parse(format!("unknown decoder key '{k}'"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        for name in [
            "bp", "bp-ff", "bp-rnn", "ms", "nms", "oms", "nnms-ff", "nnms-rnn", "noms-ff", "noms-rnn", "relaxed-bp",
            "relaxed-ms", "relaxed-noms", "mrrd-noms",
        ] {
            let s = DecoderSpec::preset(name, 3).unwrap().with_early_stop(true);
            let back: DecoderSpec = s.to_string().parse().unwrap();
            assert_eq!(back, s, "{name}");
        }
    }

    #[test]
    fn preset_with_overrides() {
        let s: DecoderSpec = "bp-rnn,iterations=3,clip=8".parse().unwrap();
        assert_eq!(s.iterations, 3);
        assert_eq!(s.clip, 8.0);
        assert!(s.is_neural_bp());
        let s: DecoderSpec = "noms-ff,iterations=4".parse().unwrap();
        assert_eq!(s.layers(), 4);
        assert_eq!(s.layer_of(2), 2);
    }

    #[test]
    fn invalid_combinations() {
        assert!("check=sum_product,weights=per_edge_offset".parse::<DecoderSpec>().is_err());
        assert!("bp,iterations=0".parse::<DecoderSpec>().is_err());
        assert!("bp,clip=0".parse::<DecoderSpec>().is_err());
        assert!("bp,post_scale=0.5".parse::<DecoderSpec>().is_err());
        assert!("bogus".parse::<DecoderSpec>().is_err());
        assert!("bp,colour=red".parse::<DecoderSpec>().is_err());
    }
}
