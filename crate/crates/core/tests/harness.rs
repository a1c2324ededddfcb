use neurodec::code::builtin;
use neurodec::decoder::{Decoder, DecoderSpec};
use neurodec::harness::*;
use neurodec::Result;

fn bp(code: &str, t: usize) -> (neurodec::code::LinearCode, Decoder) {
    let c = builtin(code).unwrap().code;
    let d = Decoder::with_defaults(DecoderSpec::plain_bp(t), c.clone()).unwrap();
    (c, d)
}

#[test]
fn sweep_is_reproducible_and_worker_independent() {
    let (code, dec) = bp("bch_15_11", 5);
    let mut cfg = SweepConfig::new(vec![2.0, 4.0], 99);
    cfg.stop = StopRule {
        min_frame_errors: 30,
        max_frames: 20_000,
    };
    let a = emit_csv(&run_ber_sweep(&code, &dec, &cfg).unwrap());
    let b = emit_csv(&run_ber_sweep(&code, &dec, &cfg).unwrap());
    assert_eq!(a, b);
    cfg.workers = 3;
    let mut c = run_ber_sweep(&code, &dec, &cfg).unwrap();
    // the CSV does not carry the squared-error sums
    c.points.iter_mut().for_each(|p| p.bit_errors_sq = None);
    assert_eq!(c.points, parse_points(&a));
}

fn parse_points(csv: &str) -> Vec<BerPoint> {
    parse_csv(csv).unwrap().points
}

#[test]
fn stopping_rule_and_report_invariants() {
    let (code, dec) = bp("hamming74", 5);
    let mut cfg = SweepConfig::new(vec![0.0, 3.0, 60.0], 1);
    cfg.stop = StopRule {
        min_frame_errors: 25,
        max_frames: 4000,
    };
    let r = run_ber_sweep(&code, &dec, &cfg).unwrap();
    assert_eq!(r.points.len(), 3);
    for p in &r.points {
        assert!(p.frame_errors >= 25 || p.frames == 4000);
        assert!(p.bit_errors <= p.bits);
        assert_eq!(p.bits, p.frames * 7);
        assert!((0.0..=1.0).contains(&p.ber));
        assert!(p.ber_std_error().unwrap() >= 0.0);
    }
    // noiseless limit
    assert_eq!(r.points[2].frame_errors, 0);
    assert_eq!(r.points[2].frames, 4000);
    assert!(r.points[0].ber > r.points[1].ber);
    assert_eq!(r.provenance.get("h_sha256"), Some(code.h_hash().as_str()));
}

#[test]
fn csv_round_trip() {
    let (code, dec) = bp("hamming74", 3);
    let mut cfg = SweepConfig::new(vec![1.0, 2.5], 4);
    cfg.stop.min_frame_errors = 10;
    let r = run_ber_sweep(&code, &dec, &cfg).unwrap();
    let text = emit_csv(&r);
    let back = parse_csv(&text).unwrap();
    assert_eq!(back.provenance, r.provenance);
    for (a, b) in back.points.iter().zip(&r.points) {
        assert_eq!((a.frames, a.frame_errors, a.bits, a.bit_errors), (b.frames, b.frame_errors, b.bits, b.bit_errors));
        assert_eq!(a.ber, b.ber);
        assert_eq!(a.ber, a.bit_errors as f64 / a.bits as f64);
        assert_eq!(a.mean_iterations, b.mean_iterations);
    }
    let empty = BerReport {
        provenance: Provenance { entries: vec![] },
        points: vec![],
    };
    assert_eq!(emit_csv(&empty), format!("{CSV_HEADER}\n"));
    assert!(parse_csv("ebno_db,frames\n").is_err());
}

struct Ml(neurodec::code::LinearCode);

impl FrameDecoder for Ml {
    fn decode_frame(&self, frame: &Frame<'_>) -> Result<FrameResult> {
        Ok(FrameResult {
            bits: exhaustive_ml_oracle(&self.0, frame.received)?,
            iterations: 0,
        })
    }
    fn describe(&self) -> String {
        "exhaustive-ml".into()
    }
}

#[test]
fn ml_oracle_dominates_bp_on_common_frames() {
    for name in ["hamming74", "bch_15_11"] {
        let (code, dec) = bp(name, 5);
        let ml = Ml(code.clone());
        let mut cfg = SweepConfig::new(vec![1.0, 3.0], 12);
        cfg.stop = StopRule {
            min_frame_errors: 60,
            max_frames: 50_000,
        };
        let reports = run_ber_comparison(&code, &[&dec, &ml], &cfg).unwrap();
        for (b, m) in reports[0].points.iter().zip(&reports[1].points) {
            assert_eq!(b.frames, m.frames);
            assert!(m.frame_errors <= b.frame_errors, "{name}: ML {} > BP {}", m.frame_errors, b.frame_errors);
        }
    }
}

#[test]
fn bp_failures_that_ml_corrects_exist() {
    use neurodec::channel::{llr, modulate, sigma_from_ebno, transmit, RngStream};
    let (code, dec) = bp("bch_15_11", 5);
    let sigma = sigma_from_ebno(1.0, code.rate()).unwrap();
    let mut rng = RngStream::new(2, 0);
    let zero = vec![0u8; 15];
    let found = (0..5000).any(|_| {
        let y = transmit(&mut rng, &modulate(&zero), sigma);
        let l = llr(&y, sigma).unwrap();
        dec.decode(&l).unwrap().hard_decisions != zero && exhaustive_ml_oracle(&code, &y).unwrap() == zero
    });
    assert!(found);
}

#[test]
fn invalid_configs_rejected() {
    let (code, dec) = bp("hamming74", 2);
    assert!(run_ber_sweep(&code, &dec, &SweepConfig::new(vec![], 0)).is_err());
    let mut cfg = SweepConfig::new(vec![1.0], 0);
    cfg.stop.min_frame_errors = 0;
    assert!(run_ber_sweep(&code, &dec, &cfg).is_err());
}
