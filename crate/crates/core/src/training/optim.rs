use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    RmsProp,
    Adam,
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::RmsProp => "rmsprop",
            OptimizerKind::Adam => "adam",
        })
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" => Ok(OptimizerKind::Sgd),
            "rmsprop" => Ok(OptimizerKind::RmsProp),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::Parse(format!("unknown optimizer '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub minibatch_size: usize,
    pub steps: usize,
    /// RMSProp squared-gradient decay.
    pub decay: f64,
    /// RMSProp ε (inside the square root).
    pub rms_epsilon: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Adam ε (outside the square root).
    pub adam_epsilon: f64,
}

impl OptimizerConfig {
    pub fn new(kind: OptimizerKind, learning_rate: f64, minibatch_size: usize, steps: usize) -> Self {
        OptimizerConfig {
            kind,
            learning_rate,
            minibatch_size,
            steps,
            decay: 0.9,
            rms_epsilon: 1e-10,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate must be > 0, got {}", self.learning_rate)));
        }
        if self.minibatch_size == 0 {
            return Err(Error::InvalidArgument("minibatch size must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Per-parameter optimizer state over a flat parameter vector.
#[derive(Clone, Debug)]
pub struct Optimizer {
    cfg: OptimizerConfig,
    first: Vec<f64>,
    second: Vec<f64>,
    step: u64,
}

impl Optimizer {
    pub fn new(cfg: OptimizerConfig, num_params: usize) -> Result<Self> {
        cfg.validate()?;
        Ok(Optimizer {
            cfg,
            first: vec![0.0; num_params],
            second: vec![0.0; num_params],
            step: 0,
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.cfg
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Updates `params` in place; entries with `trainable[i] == false` are
    /// left bit-identical.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], trainable: &[bool]) -> Result<()> {
        let n = self.first.len();
        for len in [params.len(), grads.len(), trainable.len()] {
            if len != n {
                return Err(Error::Length { expected: n, got: len });
            }
        }
        self.step += 1;
        let c = &self.cfg;
        let lr = c.learning_rate;
        match c.kind {
            OptimizerKind::Sgd => {
                for i in 0..n {
                    if trainable[i] {
                        params[i] -= lr * grads[i];
                    }
                }
            }
            OptimizerKind::RmsProp => {
                for i in 0..n {
                    if trainable[i] {
                        let g = grads[i];
                        self.second[i] = c.decay * self.second[i] + (1.0 - c.decay) * g * g;
                        params[i] -= lr * g / (self.second[i] + c.rms_epsilon).sqrt();
                    }
                }
            }
            OptimizerKind::Adam => {
                let t = self.step as i32;
                let bc1 = 1.0 - c.beta1.powi(t);
                let bc2 = 1.0 - c.beta2.powi(t);
                for i in 0..n {
                    if trainable[i] {
                        let g = grads[i];
                        self.first[i] = c.beta1 * self.first[i] + (1.0 - c.beta1) * g;
                        self.second[i] = c.beta2 * self.second[i] + (1.0 - c.beta2) * g * g;
                        let m_hat = self.first[i] / bc1;
                        let v_hat = self.second[i] / bc2;
                        params[i] -= lr * m_hat / (v_hat.sqrt() + c.adam_epsilon);
                    }
                }
            }
        }
        Ok(())
    }
}
