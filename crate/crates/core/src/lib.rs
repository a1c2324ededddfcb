//! Belief-propagation decoders for short binary linear codes, with learnable
//! edge weights trained by reverse-mode differentiation through the unrolled
//! decoder, a modified random redundant decoding (mRRD) wrapper, and a
//! Monte-Carlo bit-error-rate harness over the BPSK/AWGN channel.

pub mod channel;
pub mod code;
pub mod decoder;
pub mod error;
pub mod harness;
pub mod kv;
pub mod mrrd;
pub mod training;

pub use error::{Error, Result};
