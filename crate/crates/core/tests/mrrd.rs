use neurodec::channel::{llr, modulate, sigma_from_ebno, transmit, RngStream};
use neurodec::code::{builtin, LinearCode, Permutation};
use neurodec::decoder::{DecoderSpec, Parameters};
use neurodec::harness::{correlation, exhaustive_ml_oracle};
use neurodec::kv::KeyValues;
use neurodec::mrrd::*;
use proptest::prelude::*;

fn noisy(code: &LinearCode, seed: u64, snr: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = RngStream::new(seed, 0);
    let sigma = sigma_from_ebno(snr, code.rate()).unwrap();
    let y = transmit(&mut rng, &modulate(&vec![0; code.n()]), sigma);
    let l = llr(&y, sigma).unwrap();
    (y, l)
}

#[test]
fn noiseless_frame_found_in_first_block() {
    let code = builtin("bch_63_36").unwrap().code;
    let y = vec![1.0; 63];
    let l = vec![-6.0; 63];
    for m in [1, 3] {
        let cfg = MrrdConfig::plain(&code, m, 30).unwrap();
        let out = mrrd_decode(&code, &cfg, 5, &l, &y).unwrap();
        assert_eq!(out.codeword, vec![0; 63]);
        assert_eq!(out.stats.iterations, 2 * m);
        assert_eq!(out.candidates.len(), m);
        assert_eq!(out.winner.unwrap().block, 0);
    }
    let cfg = MrrdConfig::plain(&code, 1, 30).unwrap();
    let mut rng = RngStream::new(1, 0);
    let (cand, stats) = run_branch(&code, &cfg, &mut rng, 0, &l).unwrap();
    assert_eq!(cand.unwrap().block, 0);
    assert_eq!(stats.iterations, 2);
}

#[test]
fn single_block_undecodable_noise() {
    let code = builtin("bch_63_36").unwrap().code;
    let cfg = MrrdConfig::plain(&code, 1, 1).unwrap();
    // pure noise at a very low SNR
    let (_, l) = noisy(&code, 3, -6.0);
    let mut rng = RngStream::new(1, 0);
    let (cand, stats) = run_branch(&code, &cfg, &mut rng, 0, &l).unwrap();
    assert!(cand.is_none());
    assert_eq!(stats.iterations, 2);
    assert_eq!(stats.blocks, 1);
}

#[test]
fn least_metric_selection() {
    let id = Permutation::identity(7);
    let cand = |cw: Vec<u8>, branch| Candidate {
        codeword: cw,
        permutation: id.clone(),
        branch,
        block: 0,
    };
    let c1 = vec![0, 0, 0, 0, 0, 0, 0];
    let c2 = vec![1, 1, 0, 1, 0, 0, 0];
    let c3 = vec![0, 1, 1, 0, 1, 0, 0];
    let y = [0.9, -0.2, 0.4, -1.1, 0.3, 0.8, 1.0];
    // hand oracle: correlation = Σ y_v (1 − 2 c_v)
    // c1: 0.9−0.2+0.4−1.1+0.3+0.8+1.0 = 2.1
    // c2: −0.9+0.2+0.4+1.1+0.3+0.8+1.0 = 2.9
    // c3: 0.9+0.2−0.4−1.1−0.3+0.8+1.0 = 1.1
    let cs = vec![cand(c1.clone(), 0), cand(c2.clone(), 1), cand(c3, 2)];
    assert!((correlation(&y, &c2) - 2.9).abs() < 1e-12);
    assert_eq!(least_metric_select(&cs, &y).unwrap(), 1);
    assert_eq!(least_metric_select(&cs[..1], &y).unwrap(), 0);
    let exact: Vec<f64> = modulate(&c1);
    assert_eq!(least_metric_select(&[cand(c1, 0), cand(c2, 1)], &exact).unwrap(), 0);
    assert!(least_metric_select(&[], &y).is_err());
}

#[test]
fn more_branches_never_worse_and_ml_never_beaten() {
    let code = builtin("bch_15_11").unwrap().code;
    let mut checked = 0;
    for seed in 0..300u64 {
        let (y, l) = noisy(&code, seed, 1.0);
        let small = mrrd_decode(&code, &MrrdConfig::plain(&code, 1, 10).unwrap(), seed, &l, &y).unwrap();
        let large = mrrd_decode(&code, &MrrdConfig::plain(&code, 5, 10).unwrap(), seed, &l, &y).unwrap();
        // smaller run is a prefix of the larger one
        assert_eq!(small.candidates[..], large.candidates[..small.candidates.len()]);
        let ml = exhaustive_ml_oracle(&code, &y).unwrap();
        if let (Some(a), Some(b)) = (&small.winner, &large.winner) {
            assert!(correlation(&y, &b.codeword) >= correlation(&y, &a.codeword));
            checked += 1;
        }
        if large.winner.is_some() {
            assert!(correlation(&y, &ml) >= correlation(&y, &large.codeword));
        }
    }
    assert!(checked > 100);
}

#[test]
fn experiment_file_round_trip() {
    let e = MrrdExperiment {
        m: 5,
        c: 50,
        inner_iterations: 2,
        inner_spec: DecoderSpec::preset("mrrd-noms", 2).unwrap(),
        inner_params: Some("noms.params".into()),
        extrinsic_carry: true,
        seed: 7,
    };
    let back = MrrdExperiment::from_kv(&KeyValues::parse(&e.to_kv().emit()).unwrap()).unwrap();
    assert_eq!(back, e);
    assert!(MrrdConfig::new(0, 1, 2, DecoderSpec::plain_bp(2), Parameters::init(&DecoderSpec::plain_bp(2), builtin("hamming74").unwrap().code.graph())).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn candidates_are_valid_and_bookkeeping_inverts(seed in any::<u64>(), snr in 1.0f64..4.0, carry in any::<bool>()) {
        let code = builtin("bch_63_45").unwrap().code;
        let (y, l) = noisy(&code, seed, snr);
        let mut cfg = MrrdConfig::plain(&code, 3, 8).unwrap();
        cfg.extrinsic_carry = carry;
        let out = mrrd_decode(&code, &cfg, seed ^ 0xabc, &l, &y).unwrap();
        prop_assert_eq!(out.stats.iterations, 2 * out.stats.blocks);
        prop_assert!(out.stats.iterations >= 2);
        for c in &out.candidates {
            prop_assert!(code.is_codeword(&c.codeword).unwrap());
            let branch_frame = c.permutation.apply(&c.codeword);
            prop_assert_eq!(&c.permutation.inverse().apply(&branch_frame), &c.codeword);
            prop_assert!(code.is_codeword(&branch_frame).unwrap());
        }
        if let Some(w) = &out.winner {
            prop_assert_eq!(&w.codeword, &out.codeword);
            prop_assert!(code.is_codeword(&out.codeword).unwrap());
            for c in &out.candidates {
                prop_assert!(correlation(&y, &w.codeword) >= correlation(&y, &c.codeword));
            }
        }
    }
}
