//! Monte-Carlo BER engine, exhaustive oracles and report I/O.

pub mod ber;
pub mod oracle;
pub mod report;

pub use ber::{run_ber_comparison, run_ber_sweep, Frame, FrameDecoder, FrameResult, StopRule, SweepConfig};
pub use oracle::{correlation, exhaustive_map_llrs, exhaustive_map_oracle, exhaustive_ml_oracle};
pub use report::{emit_csv, parse_csv, BerPoint, BerReport, Provenance, CSV_HEADER};
