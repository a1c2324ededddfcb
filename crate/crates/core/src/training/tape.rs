//! Scalar reverse-mode tape over the decoder's primitive set.

use crate::decoder::arith::{atanh_odd, clamp_product, sigmoid, Arith, ATANH_GUARD, LOG_FLOOR};

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Const,
    /// Leaf bound to a flat parameter index.
    Param(u32),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    TanhHalf(Var),
    AtanhTwice(Var),
    Sigmoid(Var),
    Clip(Var, f64),
    Abs(Var),
    Relu(Var),
    LnGuarded(Var),
}

/// Discrete branch taken by a kinked primitive, used to detect whether a
/// perturbation crosses a non-differentiable point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Smooth,
    Below,
    Inside,
    Above,
}

#[derive(Clone, Debug, Default)]
pub struct Tape {
    ops: Vec<Op>,
    values: Vec<f64>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.ops.clear();
        self.values.clear();
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn push(&mut self, op: Op, value: f64) -> Var {
        let id = self.ops.len() as u32;
        self.ops.push(op);
        self.values.push(value);
        Var(id)
    }

    pub fn push_const(&mut self, value: f64) -> Var {
        self.push(Op::Const, value)
    }

    /// Leaf for flat parameter `index` with the given value.
    pub fn param(&mut self, index: usize, value: f64) -> Var {
        self.push(Op::Param(index as u32), value)
    }

    #[inline]
    fn val(&self, v: Var) -> f64 {
        self.values[v.0 as usize]
    }

    fn eval(op: Op, values: &[f64], own: f64, params: Option<&[f64]>) -> f64 {
        let v = |x: Var| values[x.0 as usize];
        match op {
            Op::Const => own,
            Op::Param(i) => params.map_or(own, |p| p[i as usize]),
            Op::Add(a, b) => v(a) + v(b),
            Op::Sub(a, b) => v(a) - v(b),
            Op::Mul(a, b) => v(a) * v(b),
            Op::Scale(a, k) => k * v(a),
            Op::TanhHalf(a) => (0.5 * v(a)).tanh(),
            Op::AtanhTwice(a) => 2.0 * atanh_odd(clamp_product(v(a))),
            Op::Sigmoid(a) => sigmoid(v(a)),
            Op::Clip(a, k) => v(a).clamp(-k, k),
            Op::Abs(a) => v(a).abs(),
            Op::Relu(a) => v(a).max(0.0),
            Op::LnGuarded(a) => v(a).max(LOG_FLOOR).ln(),
        }
    }

    /// Recomputes every node from its inputs, optionally with new parameter
    /// values. With `None` the result reproduces the recorded values exactly.
    pub fn replay(&self, params: Option<&[f64]>) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len());
        for (i, &op) in self.ops.iter().enumerate() {
            let x = Self::eval(op, &out, self.values[i], params);
            out.push(x);
        }
        out
    }

    /// Adjoints of every node with respect to `output`, visiting nodes in
    /// exact reverse order of recording.
    pub fn adjoints(&self, output: Var) -> Vec<f64> {
        let mut adj = vec![0.0; self.ops.len()];
        adj[output.0 as usize] = 1.0;
        for i in (0..=output.0 as usize).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            let y = self.values[i];
            match self.ops[i] {
                Op::Const | Op::Param(_) => {}
                Op::Add(a, b) => {
                    adj[a.0 as usize] += g;
                    adj[b.0 as usize] += g;
                }
                Op::Sub(a, b) => {
                    adj[a.0 as usize] += g;
                    adj[b.0 as usize] -= g;
                }
                Op::Mul(a, b) => {
                    let (va, vb) = (self.val(a), self.val(b));
                    adj[a.0 as usize] += g * vb;
                    adj[b.0 as usize] += g * va;
                }
                Op::Scale(a, k) => adj[a.0 as usize] += g * k,
                Op::TanhHalf(a) => adj[a.0 as usize] += g * 0.5 * (1.0 - y * y),
                Op::AtanhTwice(a) => {
                    let p = self.val(a);
                    if p.abs() <= 1.0 - ATANH_GUARD {
                        adj[a.0 as usize] += g * 2.0 / (1.0 - p * p);
                    }
                }
                Op::Sigmoid(a) => adj[a.0 as usize] += g * y * (1.0 - y),
                Op::Clip(a, k) => {
                    if self.val(a).abs() <= k {
                        adj[a.0 as usize] += g;
                    }
                }
                Op::Abs(a) => {
                    let x = self.val(a);
                    if x > 0.0 {
                        adj[a.0 as usize] += g;
                    } else if x < 0.0 {
                        adj[a.0 as usize] -= g;
                    }
                }
                Op::Relu(a) => {
                    if self.val(a) > 0.0 {
                        adj[a.0 as usize] += g;
                    }
                }
                Op::LnGuarded(a) => {
                    let x = self.val(a);
                    if x > LOG_FLOOR {
                        adj[a.0 as usize] += g / x;
                    }
                }
            }
        }
        adj
    }

    /// Gradient of `output` with respect to each flat parameter index.
    pub fn backward(&self, output: Var, num_params: usize) -> Vec<f64> {
        let adj = self.adjoints(output);
        let mut grad = vec![0.0; num_params];
        for (i, op) in self.ops.iter().enumerate() {
            if let Op::Param(p) = op {
                grad[*p as usize] += adj[i];
            }
        }
        grad
    }

    /// Branch of every kinked node, in recording order.
    pub fn branches(&self) -> Vec<Branch> {
        self.ops
            .iter()
            .map(|&op| match op {
                Op::Clip(a, k) => {
                    let x = self.val(a);
                    if x < -k {
                        Branch::Below
                    } else if x > k {
                        Branch::Above
                    } else {
                        Branch::Inside
                    }
                }
                Op::Abs(a) | Op::Relu(a) => {
                    let x = self.val(a);
                    if x < 0.0 {
                        Branch::Below
                    } else if x > 0.0 {
                        Branch::Above
                    } else {
                        Branch::Inside
                    }
                }
                Op::AtanhTwice(a) => {
                    if self.val(a).abs() <= 1.0 - ATANH_GUARD {
                        Branch::Inside
                    } else {
                        Branch::Above
                    }
                }
                Op::LnGuarded(a) => {
                    if self.val(a) > LOG_FLOOR {
                        Branch::Inside
                    } else {
                        Branch::Below
                    }
                }
                _ => Branch::Smooth,
            })
            .collect()
    }
}

impl Arith for Tape {
    type V = Var;

    #[inline]
    fn constant(&mut self, x: f64) -> Var {
        self.push(Op::Const, x)
    }
    #[inline]
    fn value(&self, a: Var) -> f64 {
        self.val(a)
    }
    #[inline]
    fn add(&mut self, a: Var, b: Var) -> Var {
        let x = self.val(a) + self.val(b);
        self.push(Op::Add(a, b), x)
    }
    #[inline]
    fn sub(&mut self, a: Var, b: Var) -> Var {
        let x = self.val(a) - self.val(b);
        self.push(Op::Sub(a, b), x)
    }
    #[inline]
    fn mul(&mut self, a: Var, b: Var) -> Var {
        let x = self.val(a) * self.val(b);
        self.push(Op::Mul(a, b), x)
    }
    #[inline]
    fn scale(&mut self, a: Var, k: f64) -> Var {
        let x = k * self.val(a);
        self.push(Op::Scale(a, k), x)
    }
    #[inline]
    fn tanh_half(&mut self, a: Var) -> Var {
        let x = (0.5 * self.val(a)).tanh();
        self.push(Op::TanhHalf(a), x)
    }
    #[inline]
    fn atanh_twice(&mut self, a: Var) -> Var {
        let x = 2.0 * atanh_odd(clamp_product(self.val(a)));
        self.push(Op::AtanhTwice(a), x)
    }
    #[inline]
    fn sigmoid(&mut self, a: Var) -> Var {
        let x = sigmoid(self.val(a));
        self.push(Op::Sigmoid(a), x)
    }
    #[inline]
    fn clip(&mut self, a: Var, bound: f64) -> Var {
        let x = self.val(a).clamp(-bound, bound);
        self.push(Op::Clip(a, bound), x)
    }
    #[inline]
    fn abs(&mut self, a: Var) -> Var {
        let x = self.val(a).abs();
        self.push(Op::Abs(a), x)
    }
    #[inline]
    fn relu(&mut self, a: Var) -> Var {
        let x = self.val(a).max(0.0);
        self.push(Op::Relu(a), x)
    }
    #[inline]
    fn ln_guarded(&mut self, a: Var) -> Var {
        let x = self.val(a).max(LOG_FLOOR).ln();
        self.push(Op::LnGuarded(a), x)
    }
}
