//! Exhaustive MAP / ML decoding for codes with K ≤ 20.

use crate::code::LinearCode;
use crate::error::{Error, Result};

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

fn check_len(code: &LinearCode, v: &[f64]) -> Result<()> {
    if v.len() != code.n() {
        return Err(Error::Length {
            expected: code.n(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Exact bitwise posterior LLRs log Pr(c_v=1|y)/Pr(c_v=0|y) given channel
/// LLRs (same sign convention). Under a memoryless channel the codeword
/// log-likelihood is Σ_v c_v·l_v up to a constant, so each posterior is a
/// log-sum-exp over the codewords with c_v = 1 minus the one with c_v = 0.
pub fn exhaustive_map_llrs(code: &LinearCode, llr: &[f64]) -> Result<Vec<f64>> {
    check_len(code, llr)?;
    let book = code.codebook()?;
    let scores: Vec<f64> = book
        .iter()
        .map(|c| c.iter().zip(llr).filter(|(&b, _)| b == 1).map(|(_, &l)| l).sum())
        .collect();
    let mut ones = Vec::with_capacity(book.len());
    let mut zeros = Vec::with_capacity(book.len());
    Ok((0..code.n())
        .map(|v| {
            ones.clear();
            zeros.clear();
            for (c, &s) in book.iter().zip(&scores) {
                if c[v] == 1 {
                    ones.push(s)
                } else {
                    zeros.push(s)
                }
            }
            log_sum_exp(&ones) - log_sum_exp(&zeros)
        })
        .collect())
}

/// Exact bitwise posteriors Pr(c_v = 1 | y).
pub fn exhaustive_map_oracle(code: &LinearCode, llr: &[f64]) -> Result<Vec<f64>> {
    Ok(exhaustive_map_llrs(code, llr)?
        .into_iter()
        .map(crate::decoder::arith::sigmoid)
        .collect())
}

/// BPSK correlation Σ_v y_v (1 − 2c_v); larger means closer in Euclidean distance.
pub fn correlation(received: &[f64], codeword: &[u8]) -> f64 {
    received
        .iter()
        .zip(codeword)
        .map(|(&y, &c)| if c == 0 { y } else { -y })
        .sum()
}

/// Maximum-likelihood codeword for received BPSK values; ties go to the
/// lexicographically smallest codeword.
pub fn exhaustive_ml_oracle(code: &LinearCode, received: &[f64]) -> Result<Vec<u8>> {
    check_len(code, received)?;
    let book = code.codebook()?;
    let mut best: Option<(f64, &Vec<u8>)> = None;
    for c in &book {
        let s = correlation(received, c);
        best = match best {
            Some((bs, bc)) if bs > s || (bs == s && bc <= c) => Some((bs, bc)),
            _ => Some((s, c)),
        };
    }
    Ok(best.expect("codebook is nonempty").1.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::builtin;

    #[test]
    fn repetition_closed_form() {
        let code = builtin("rep3").unwrap().code;
        let l = [-1.0, -2.0, 0.5];
        let post = exhaustive_map_llrs(&code, &l).unwrap();
        // two codewords: 000 (score 0) and 111 (score −2.5)
        for p in post {
            assert!((p - -2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_llr_gives_half() {
        let code = builtin("hamming74").unwrap().code;
        for p in exhaustive_map_oracle(&code, &[0.0; 7]).unwrap() {
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn ml_ties_and_noiseless() {
        let code = builtin("hamming74").unwrap().code;
        let book = code.codebook().unwrap();
        let c = &book[9];
        let y: Vec<f64> = c.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(&exhaustive_ml_oracle(&code, &y).unwrap(), c);
        // all-zero received: every codeword ties, smallest is 0000000
        assert_eq!(exhaustive_ml_oracle(&code, &[0.0; 7]).unwrap(), vec![0; 7]);
        assert!(exhaustive_ml_oracle(&code, &[0.0; 6]).is_err());
    }

    #[test]
    fn large_k_rejected() {
        let code = builtin("bch_63_36").unwrap().code;
        assert!(exhaustive_ml_oracle(&code, &[0.0; 63]).is_err());
    }
}
