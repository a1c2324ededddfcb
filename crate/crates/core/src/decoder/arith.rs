//! Scalar arithmetic backend for the message-passing kernels.
//!
//! The kernels are written once against [`Arith`]; [`Plain`] evaluates them
//! directly on `f64`, while the training tape records the same sequence of
//! primitives for reverse-mode differentiation.

/// Products passed to atanh are clamped to |p| ≤ 1 − ATANH_GUARD.
pub const ATANH_GUARD: f64 = 1e-12;

/// Floor applied inside logarithms of probabilities.
pub const LOG_FLOOR: f64 = 1e-12;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// atanh evaluated on |x| with the sign restored; std's atanh loses
/// accuracy for arguments near −1.
#[inline]
pub fn atanh_odd(x: f64) -> f64 {
    x.abs().atanh().copysign(x)
}

#[inline]
pub fn clamp_product(p: f64) -> f64 {
    // symmetric in sign: −1 + g and 1 − g are not exact negatives in f64
    let bound = 1.0 - ATANH_GUARD;
    if p.abs() > bound {
        bound.copysign(p)
    } else {
        p
    }
}

pub trait Arith {
    type V: Copy;

    fn constant(&mut self, x: f64) -> Self::V;
    fn value(&self, a: Self::V) -> f64;

    fn add(&mut self, a: Self::V, b: Self::V) -> Self::V;
    fn sub(&mut self, a: Self::V, b: Self::V) -> Self::V;
    fn mul(&mut self, a: Self::V, b: Self::V) -> Self::V;
    /// `k · a` for a constant `k` (sign factors, fixed scales).
    fn scale(&mut self, a: Self::V, k: f64) -> Self::V;
    /// tanh(a / 2).
    fn tanh_half(&mut self, a: Self::V) -> Self::V;
    /// 2 · atanh(p) with p clamped by [`ATANH_GUARD`].
    fn atanh_twice(&mut self, a: Self::V) -> Self::V;
    fn sigmoid(&mut self, a: Self::V) -> Self::V;
    /// Clamp to [−bound, bound].
    fn clip(&mut self, a: Self::V, bound: f64) -> Self::V;
    fn abs(&mut self, a: Self::V) -> Self::V;
    /// max(a, 0).
    fn relu(&mut self, a: Self::V) -> Self::V;
    /// ln(max(a, LOG_FLOOR)).
    fn ln_guarded(&mut self, a: Self::V) -> Self::V;
}

/// Direct `f64` evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plain;

impl Arith for Plain {
    type V = f64;

    #[inline]
    fn constant(&mut self, x: f64) -> f64 {
        x
    }
    #[inline]
    fn value(&self, a: f64) -> f64 {
        a
    }
    #[inline]
    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline]
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline]
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }
    #[inline]
    fn scale(&mut self, a: f64, k: f64) -> f64 {
        k * a
    }
    #[inline]
    fn tanh_half(&mut self, a: f64) -> f64 {
        (0.5 * a).tanh()
    }
    #[inline]
    fn atanh_twice(&mut self, a: f64) -> f64 {
        2.0 * atanh_odd(clamp_product(a))
    }
    #[inline]
    fn sigmoid(&mut self, a: f64) -> f64 {
        sigmoid(a)
    }
    #[inline]
    fn clip(&mut self, a: f64, bound: f64) -> f64 {
        a.clamp(-bound, bound)
    }
    #[inline]
    fn abs(&mut self, a: f64) -> f64 {
        a.abs()
    }
    #[inline]
    fn relu(&mut self, a: f64) -> f64 {
        a.max(0.0)
    }
    #[inline]
    fn ln_guarded(&mut self, a: f64) -> f64 {
        a.max(LOG_FLOOR).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable_and_symmetric() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        for x in [0.1, 1.0, 5.0, 30.0] {
            assert!((sigmoid(x) + sigmoid(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn atanh_guard_bounds_output() {
        let mut p = Plain;
        let big = p.atanh_twice(1.0);
        assert!(big.is_finite());
        assert!((big - 2.0 * (1.0 - ATANH_GUARD).atanh()).abs() < 1e-12);
        assert_eq!(p.atanh_twice(-1.0), -big);
    }
}
