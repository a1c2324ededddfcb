use std::fmt::Write as _;

use super::ber::SweepConfig;
use crate::code::LinearCode;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "ebno_db,frames,frame_errors,bits,bit_errors,ber,fer,mean_iterations";

#[derive(Clone, Debug, PartialEq)]
pub struct BerPoint {
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iterations: f64,
    /// Σ over frames of (bit errors in frame)², when known; feeds the
    /// standard error of the BER estimate.
    pub bit_errors_sq: Option<u128>,
}

impl BerPoint {
    pub fn from_counts(
        ebno_db: f64,
        frames: u64,
        frame_errors: u64,
        bits: u64,
        bit_errors: u64,
        iterations: u64,
        bit_errors_sq: Option<u128>,
    ) -> Self {
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        BerPoint {
            ebno_db,
            frames,
            frame_errors,
            bits,
            bit_errors,
            ber: ratio(bit_errors, bits),
            fer: ratio(frame_errors, frames),
            mean_iterations: ratio(iterations, frames),
            bit_errors_sq,
        }
    }

    /// Monte-Carlo standard error of the BER: frames are the independent
    /// samples, each contributing its bit-error fraction.
    pub fn ber_std_error(&self) -> Option<f64> {
        let sq = self.bit_errors_sq?;
        if self.frames < 2 || self.bits == 0 {
            return Some(0.0);
        }
        let n_bits = self.bits as f64 / self.frames as f64;
        let f = self.frames as f64;
        let mean = self.bit_errors as f64 / f;
        let var = (sq as f64 / f - mean * mean).max(0.0) * f / (f - 1.0);
        Some((var / f).sqrt() / n_bits)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(code: &LinearCode, decoder: &str, cfg: &SweepConfig) -> Self {
        let mut entries = vec![
            ("version".to_string(), format!("neurodec {}", env!("CARGO_PKG_VERSION"))),
            ("n".to_string(), code.n().to_string()),
            ("k".to_string(), code.k().to_string()),
            ("h_sha256".to_string(), code.h_hash()),
            ("decoder".to_string(), decoder.to_string()),
            ("seed".to_string(), cfg.seed.to_string()),
            ("workers".to_string(), cfg.workers.to_string()),
            ("min_frame_errors".to_string(), cfg.stop.min_frame_errors.to_string()),
            ("max_frames".to_string(), cfg.stop.max_frames.to_string()),
        ];
        if cfg.zero_codeword {
            entries.push(("codewords".to_string(), "zero".to_string()));
        }
        Provenance { entries }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value.to_string(),
            None => self.entries.push((key.to_string(), value.to_string())),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerReport {
    pub provenance: Provenance,
    pub points: Vec<BerPoint>,
}

/// Provenance as `# key = value` lines, then the header and one row per
/// point. Floats use Rust's shortest round-trip formatting (locale free).
pub fn emit_csv(report: &BerReport) -> String {
    let mut out = String::new();
    for (k, v) in &report.provenance.entries {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.ebno_db, p.frames, p.frame_errors, p.bits, p.bit_errors, p.ber, p.fer, p.mean_iterations
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<BerReport> {
    let mut entries = Vec::new();
    let mut points = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                entries.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if !header_seen {
            if line != CSV_HEADER {
                return Err(Error::Parse(format!("line {}: unexpected CSV header '{line}'", i + 1)));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::Parse(format!("line {}: expected 8 fields, got {}", i + 1, f.len())));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", i + 1));
        let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
        let int = |s: &str, what: &str| s.parse::<u64>().map_err(|_| bad(what));
        points.push(BerPoint {
            ebno_db: float(f[0], "ebno_db")?,
            frames: int(f[1], "frames")?,
            frame_errors: int(f[2], "frame_errors")?,
            bits: int(f[3], "bits")?,
            bit_errors: int(f[4], "bit_errors")?,
            ber: float(f[5], "ber")?,
            fer: float(f[6], "fer")?,
            mean_iterations: float(f[7], "mean_iterations")?,
            bit_errors_sq: None,
        });
    }
    if !header_seen {
        return Err(Error::Parse("missing CSV header".into()));
    }
    Ok(BerReport {
        provenance: Provenance { entries },
        points,
    })
}
