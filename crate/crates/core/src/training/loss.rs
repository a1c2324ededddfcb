use std::fmt;
use std::str::FromStr;

use crate::decoder::arith::{Arith, LOG_FLOOR};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    /// Cross-entropy of the last iteration's outputs.
    Final,
    /// Cross-entropy summed over the tapped iterations.
    Multiloss,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossConfig {
    pub kind: LossKind,
    /// 1-based iterations summed by multiloss; `None` taps every iteration.
    pub taps: Option<Vec<usize>>,
}

impl LossConfig {
    pub fn final_only() -> Self {
        LossConfig {
            kind: LossKind::Final,
            taps: None,
        }
    }

    pub fn multiloss() -> Self {
        LossConfig {
            kind: LossKind::Multiloss,
            taps: None,
        }
    }

    /// 0-based indices of the iterations contributing to the loss.
    pub fn tapped(&self, iterations: usize) -> Result<Vec<usize>> {
        if iterations == 0 {
            return Err(Error::InvalidArgument("loss needs at least one iteration".into()));
        }
        match (self.kind, &self.taps) {
            (LossKind::Final, _) => Ok(vec![iterations - 1]),
            (LossKind::Multiloss, None) => Ok((0..iterations).collect()),
            (LossKind::Multiloss, Some(taps)) => {
                if taps.is_empty() {
                    return Err(Error::InvalidArgument("multiloss tap list is empty".into()));
                }
                taps.iter()
                    .map(|&t| {
                        if t >= 1 && t <= iterations {
                            Ok(t - 1)
                        } else {
                            Err(Error::InvalidArgument(format!("multiloss tap {t} outside 1..={iterations}")))
                        }
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Final => "final",
            LossKind::Multiloss => "multiloss",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "final" => Ok(LossKind::Final),
            "multiloss" => Ok(LossKind::Multiloss),
            other => Err(Error::Parse(format!("unknown loss kind '{other}'"))),
        }
    }
}

fn check_probability(o: f64) -> Result<()> {
    if (0.0..=1.0).contains(&o) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("output probability {o} outside [0, 1]")))
    }
}

/// −(1/N) Σ_v y_v ln o_v + (1−y_v) ln(1−o_v), with logs floored at 1e-12.
pub fn cross_entropy(outputs: &[f64], targets: &[u8]) -> Result<f64> {
    if outputs.len() != targets.len() {
        return Err(Error::Length {
            expected: targets.len(),
            got: outputs.len(),
        });
    }
    if outputs.is_empty() {
        return Err(Error::InvalidArgument("empty output vector".into()));
    }
    let mut sum = 0.0;
    for (&o, &y) in outputs.iter().zip(targets) {
        check_probability(o)?;
        let p = if y == 0 { 1.0 - o } else { o };
        sum += p.max(LOG_FLOOR).ln();
    }
    Ok(-sum / outputs.len() as f64)
}

/// Σ_t cross_entropy(o_t, y): per-iteration terms normalized by 1/N only.
pub fn multiloss(outputs: &[Vec<f64>], targets: &[u8]) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::InvalidArgument("multiloss needs at least one iteration".into()));
    }
    outputs.iter().map(|o| cross_entropy(o, targets)).sum()
}

/// Loss on marginal LLR totals (log Pr(1)/Pr(0)), written once for every
/// arithmetic backend. The complement probability is evaluated as
/// sigmoid(−x) rather than 1 − sigmoid(x) to keep precision for confident
/// outputs; both sides are floored at 1e-12 before the log.
pub fn loss_from_totals<A: Arith>(a: &mut A, totals: &[Vec<A::V>], targets: &[u8], cfg: &LossConfig) -> Result<A::V> {
    let taps = cfg.tapped(totals.len())?;
    let n = targets.len();
    let mut acc: Option<A::V> = None;
    for t in taps {
        let row = &totals[t];
        if row.len() != n {
            return Err(Error::Length { expected: n, got: row.len() });
        }
        for (&x, &y) in row.iter().zip(targets) {
            let p = if y == 0 {
                let neg = a.scale(x, -1.0);
                a.sigmoid(neg)
            } else {
                a.sigmoid(x)
            };
            let l = a.ln_guarded(p);
            acc = Some(match acc {
                None => l,
                Some(s) => a.add(s, l),
            });
        }
    }
    let sum = acc.expect("at least one tap and one bit");
    Ok(a.scale(sum, -1.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::arith::Plain;

    #[test]
    fn cross_entropy_examples() {
        let l = cross_entropy(&[0.5, 0.5, 0.5], &[0, 1, 1]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        let l = cross_entropy(&[0.1, 0.2], &[0, 0]).unwrap();
        let oracle = -0.5 * ((0.9f64).ln() + (0.8f64).ln());
        assert!((l - oracle).abs() < 1e-15);
        assert!((l - 0.16425).abs() < 1e-5);
        assert!(cross_entropy(&[1e-30], &[0]).unwrap() < 1e-12);
        assert!(cross_entropy(&[1.5], &[0]).is_err());
        assert!(cross_entropy(&[f64::NAN], &[0]).is_err());
    }

    #[test]
    fn multiloss_sums_iterations() {
        let o = vec![0.1, 0.4];
        let y = [0, 1];
        let single = cross_entropy(&o, &y).unwrap();
        assert_eq!(multiloss(&[o.clone()], &y).unwrap(), single);
        let triple = multiloss(&[o.clone(), o.clone(), o], &y).unwrap();
        assert!((triple - 3.0 * single).abs() < 1e-15);
    }

    #[test]
    fn totals_loss_agrees_with_probability_form() {
        let totals = vec![vec![-2.0, 0.3, 4.0], vec![-1.0, -0.5, 2.0]];
        let y = [0u8, 0, 1];
        let probs: Vec<Vec<f64>> = totals
            .iter()
            .map(|r| r.iter().map(|&x| crate::decoder::arith::sigmoid(x)).collect())
            .collect();
        let ml = loss_from_totals(&mut Plain, &totals, &y, &LossConfig::multiloss()).unwrap();
        assert!((ml - multiloss(&probs, &y).unwrap()).abs() < 1e-14);
        let fin = loss_from_totals(&mut Plain, &totals, &y, &LossConfig::final_only()).unwrap();
        assert!((fin - cross_entropy(&probs[1], &y).unwrap()).abs() < 1e-14);
        let tapped = LossConfig {
            kind: LossKind::Multiloss,
            taps: Some(vec![1]),
        };
        let first = loss_from_totals(&mut Plain, &totals, &y, &tapped).unwrap();
        assert!((first - cross_entropy(&probs[0], &y).unwrap()).abs() < 1e-14);
        assert!(LossConfig { kind: LossKind::Multiloss, taps: Some(vec![3]) }.tapped(2).is_err());
    }
}
