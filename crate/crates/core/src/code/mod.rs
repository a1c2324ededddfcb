//! Binary linear codes: matrices, alist I/O, BCH construction, Tanner graphs
//! and automorphism sampling.

pub mod alist;
pub mod automorphism;
pub mod bundle;
pub mod gf2m;
pub mod linear;
pub mod matrix;
pub mod tanner;

pub use alist::{emit_alist, parse_alist};
pub use automorphism::{sample_automorphism, verify_cyclic_automorphisms, Permutation};
pub use bundle::{builtin, load_code, CodeBundle, BUILTIN_CODES};
pub use gf2m::{bch_generator_poly, Gf2Poly, Gf2mField};
pub use linear::{circulant_parity_matrix, cyclic_parity_matrix, LinearCode};
pub use matrix::BinaryMatrix;
pub use tanner::TannerGraph;
