//! GF(2) polynomials, GF(2^m) log/antilog arithmetic and BCH generator
//! polynomials.

use std::fmt;

use crate::error::{Error, Result};

/// Polynomial over GF(2); `coeffs[i]` is the coefficient of `x^i`.
/// Always normalized so the leading coefficient is 1 (or the vector is empty for 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    coeffs: Vec<u8>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly { coeffs: vec![1] }
    }

    pub fn from_coeffs(coeffs: &[u8]) -> Self {
        let mut p = Gf2Poly {
            coeffs: coeffs.iter().map(|&c| c & 1).collect(),
        };
        p.normalize();
        p
    }

    /// Bit `i` of `bits` is the coefficient of `x^i`.
    pub fn from_bits(bits: u128) -> Self {
        let coeffs = (0..128).map(|i| ((bits >> i) & 1) as u8).collect::<Vec<_>>();
        Self::from_coeffs(&coeffs)
    }

    /// `x^n + 1` (which equals `x^n - 1` over GF(2)).
    pub fn x_n_minus_one(n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[0] = 1;
        c[n] = 1;
        Self::from_coeffs(&c)
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c == 1).count()
    }

    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let mut out = vec![0u8; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 1 {
                for (j, &b) in other.coeffs.iter().enumerate() {
                    out[i + j] ^= b;
                }
            }
        }
        Gf2Poly::from_coeffs(&out)
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn div_rem(&self, divisor: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u8; self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = rem.iter().rposition(|&c| c == 1) {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot[shift] ^= 1;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] ^= b;
            }
        }
        Ok((Gf2Poly::from_coeffs(&quot), Gf2Poly::from_coeffs(&rem)))
    }

    pub fn gcd(&self, other: &Gf2Poly) -> Gf2Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let g = self.gcd(other);
        let (q, _) = self.mul(other).div_rem(&g).expect("gcd is nonzero");
        q
    }

    /// Coefficients reversed: `x^deg · p(1/x)`.
    pub fn reciprocal(&self) -> Gf2Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Gf2Poly::from_coeffs(&c)
    }

    /// Compact hex form, bit i = coefficient of x^i.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0".into();
        }
        let mut digits = String::new();
        for chunk in (0..self.coeffs.len()).step_by(4).rev() {
            let nib = (0..4).fold(0u8, |acc, b| acc | (self.coeff(chunk + b) << b));
            digits.push(char::from_digit(nib as u32, 16).unwrap());
        }
        format!("0x{}", digits.trim_start_matches('0'))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = (0..self.coeffs.len())
            .rev()
            .filter(|&i| self.coeffs[i] == 1)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

/// Standard primitive polynomials, bit-encoded, indexed by extension degree.
fn default_primitive_poly(m: u32) -> Option<u32> {
    Some(match m {
        2 => 0b111,
        3 => 0b1011,
        4 => 0b1_0011,
        5 => 0b10_0101,
        6 => 0b100_0011,
        7 => 0b1000_1001,
        8 => 0b1_0001_1101,
        9 => 0b10_0001_0001,
        10 => 0b100_0000_1001,
        _ => return None,
    })
}

/// GF(2^m) with log/antilog tables over a primitive polynomial.
#[derive(Clone, Debug)]
pub struct Gf2mField {
    m: u32,
    primitive_poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl Gf2mField {
    /// Field with the standard primitive polynomial for `m` (2 ≤ m ≤ 10).
    pub fn new(m: u32) -> Result<Self> {
        let poly = default_primitive_poly(m)
            .ok_or_else(|| Error::Unsupported(format!("no default primitive polynomial for m = {m}")))?;
        Self::with_poly(m, poly)
    }

    pub fn with_poly(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=15).contains(&m) || primitive_poly >> m != 1 {
            return Err(Error::InvalidArgument(format!(
                "polynomial {primitive_poly:#x} does not have degree {m}"
            )));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; order];
        let mut log = vec![0u16; order + 1];
        let mut x: u32 = 1;
        for (i, e) in exp.iter_mut().enumerate() {
            if i > 0 && x == 1 {
                return Err(Error::InvalidArgument(format!("{primitive_poly:#x} is not primitive")));
            }
            *e = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m == 1 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::InvalidArgument(format!("{primitive_poly:#x} is not primitive")));
        }
        Ok(Gf2mField {
            m,
            primitive_poly,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Multiplicative order 2^m − 1, which is also the BCH block length.
    pub fn order(&self) -> usize {
        self.exp.len()
    }

    /// α^i.
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order()]
    }

    pub fn log(&self, x: u16) -> Option<usize> {
        (x != 0).then(|| self.log[x as usize] as usize)
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        match (self.log(a), self.log(b)) {
            (Some(la), Some(lb)) => self.exp[(la + lb) % self.order()],
            _ => 0,
        }
    }

    /// Cyclotomic coset of `i` modulo 2^m − 1.
    pub fn cyclotomic_coset(&self, i: usize) -> Vec<usize> {
        let n = self.order();
        let mut coset = vec![i % n];
        let mut j = (2 * i) % n;
        while j != i % n {
            coset.push(j);
            j = (2 * j) % n;
        }
        coset
    }

    /// Minimal polynomial of α^i over GF(2): ∏ (x − α^j) over the coset of i.
    pub fn minimal_poly(&self, i: usize) -> Gf2Poly {
        // Coefficients in GF(2^m), lowest degree first.
        let mut p: Vec<u16> = vec![1];
        for j in self.cyclotomic_coset(i) {
            let root = self.alpha_pow(j);
            let mut next = vec![0u16; p.len() + 1];
            for (k, &c) in p.iter().enumerate() {
                next[k + 1] ^= c;
                next[k] ^= self.mul(c, root);
            }
            p = next;
        }
        debug_assert!(p.iter().all(|&c| c <= 1), "minimal polynomial must be binary");
        Gf2Poly::from_coeffs(&p.iter().map(|&c| c as u8).collect::<Vec<_>>())
    }
}

/// Generator polynomial of the narrow-sense binary BCH code of length 2^m − 1
/// correcting `t` errors: lcm of the minimal polynomials of α, α², …, α^{2t}.
pub fn bch_generator_poly(field: &Gf2mField, t: usize) -> Result<Gf2Poly> {
    let n = field.order();
    if t == 0 || 2 * t >= n {
        return Err(Error::InvalidArgument(format!(
            "designed error count t = {t} out of range for length {n}"
        )));
    }
    Ok((1..=2 * t).fold(Gf2Poly::one(), |g, i| g.lcm(&field.minimal_poly(i))))
}
