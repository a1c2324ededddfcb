use rand::Rng;

use super::linear::LinearCode;
use crate::error::{Error, Result};

/// Bijection on codeword positions. Applying it moves the symbol at
/// position `i` to position `map[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &t in &map {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidArgument("map is not a bijection".into()));
            }
        }
        Ok(Permutation { map })
    }

    /// The affine map i ↦ (2^a · i + b) mod n on a cyclic code of length n.
    pub fn affine(n: usize, a: u32, b: usize) -> Self {
        let mult = (1usize << a) % n;
        Permutation {
            map: (0..n).map(|i| (mult * i + b) % n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.map.len(), "permutation length mismatch");
        let mut out = x.to_vec();
        for (i, &t) in self.map.iter().enumerate() {
            out[t] = x[i];
        }
        out
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &t) in self.map.iter().enumerate() {
            inv[t] = i;
        }
        Permutation { map: inv }
    }

    /// `self` followed by `next`: `then(next).apply(x) == next.apply(&self.apply(x))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation {
            map: self.map.iter().map(|&t| next.map[t]).collect(),
        }
    }

    /// Whether the permutation maps every listed codeword to a codeword.
    pub fn preserves(&self, code: &LinearCode, codewords: &[Vec<u8>]) -> Result<bool> {
        for c in codewords {
            if !code.is_codeword(&self.apply(c))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Extension degree m with n = 2^m − 1, if any.
fn cyclic_degree(n: usize) -> Option<u32> {
    let m = (n + 1).trailing_zeros();
    (n >= 3 && (n + 1).is_power_of_two()).then_some(m)
}

/// Uniform element of the group generated by the cyclic shift and the
/// Frobenius doubling map, which lies in the automorphism group of every
/// binary cyclic (in particular BCH) code of length n = 2^m − 1.
pub fn sample_automorphism<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Permutation> {
    let m = cyclic_degree(n).ok_or_else(|| Error::Unsupported(format!("automorphism sampling for length {n}")))?;
    let a = rng.gen_range(0..m);
    let b = rng.gen_range(0..n);
    Ok(Permutation::affine(n, a, b))
}

/// Checks that the shift and doubling generators preserve the code, which
/// holds for cyclic codes but not for arbitrary H of the same length.
pub fn verify_cyclic_automorphisms(code: &LinearCode) -> Result<bool> {
    let n = code.n();
    if cyclic_degree(n).is_none() {
        return Ok(false);
    }
    let gens = [Permutation::affine(n, 0, 1), Permutation::affine(n, 1, 0)];
    let rows: Vec<Vec<u8>> = (0..code.k()).map(|r| code.generator().row(r).to_vec()).collect();
    for p in &gens {
        if !p.preserves(code, &rows)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::gf2m::Gf2Poly;
    use crate::code::linear::cyclic_parity_matrix;
    use crate::code::matrix::BinaryMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyclic_hamming() -> LinearCode {
        LinearCode::new(cyclic_parity_matrix(&Gf2Poly::from_bits(0b1011), 7).unwrap()).unwrap()
    }

    #[test]
    fn shift_and_doubling_preserve_hamming() {
        let code = cyclic_hamming();
        let book = code.codebook().unwrap();
        assert!(Permutation::affine(7, 0, 1).preserves(&code, &book).unwrap());
        assert!(Permutation::affine(7, 1, 0).preserves(&code, &book).unwrap());
        assert_eq!(Permutation::affine(7, 0, 0), Permutation::identity(7));
        assert!(verify_cyclic_automorphisms(&code).unwrap());
    }

    #[test]
    fn column_ordered_hamming_is_not_cyclic() {
        let h = BinaryMatrix::from_row_support(7, &[vec![0, 2, 4, 6], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap();
        let code = LinearCode::new(h).unwrap();
        assert!(!verify_cyclic_automorphisms(&code).unwrap());
    }

    #[test]
    fn sampled_permutations_preserve_bch_15_11() {
        let code = LinearCode::new(cyclic_parity_matrix(&Gf2Poly::from_bits(0b10011), 15).unwrap()).unwrap();
        let book = code.codebook().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = sample_automorphism(&mut rng, 15).unwrap();
            assert!(p.preserves(&code, &book).unwrap());
        }
        assert!(sample_automorphism(&mut rng, 10).is_err());
    }

    #[test]
    fn inverse_and_composition() {
        let p = Permutation::affine(15, 2, 5);
        let q = Permutation::affine(15, 1, 3);
        let x: Vec<usize> = (0..15).collect();
        assert_eq!(p.inverse().apply(&p.apply(&x)), x);
        assert_eq!(p.then(&q).apply(&x), q.apply(&p.apply(&x)));
        assert!(Permutation::from_map(vec![0, 0]).is_err());
        assert!(Permutation::from_map(vec![1, 0]).is_ok());
    }
}
