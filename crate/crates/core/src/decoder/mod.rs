//! Unrolled flooding message passing: plain and neural sum-product, min-sum
//! with normalization/offset corrections, weight tying and relaxation.

pub mod arith;
pub mod engine;
pub mod kernels;
pub mod params;
pub mod spec;

pub use arith::{sigmoid, Arith, Plain};
pub use engine::{decode, decode_graph, unroll, DecodeOutput, Decoder, Unrolled};
pub use params::{group_shape, ParamBundle, ParamGroup, ParamSet, Parameters, Shape};
pub use spec::{CheckRule, DecoderSpec, EdgeIndexing, Relaxation, Tying, WeightMode, DEFAULT_CLIP};
