use sha2::{Digest, Sha256};

use super::alist::emit_alist;
use super::gf2m::Gf2Poly;
use super::matrix::BinaryMatrix;
use super::tanner::TannerGraph;
use crate::error::{Error, Result};

/// Binary linear code defined by a parity-check matrix, with an encoder
/// derived by Gaussian elimination and its Tanner graph.
#[derive(Clone, Debug)]
pub struct LinearCode {
    h: BinaryMatrix,
    generator: BinaryMatrix,
    /// Codeword positions that carry the information bits verbatim.
    info_positions: Vec<usize>,
    graph: TannerGraph,
}

impl LinearCode {
    pub fn new(h: BinaryMatrix) -> Result<Self> {
        let n = h.cols();
        let (reduced, pivots) = h.rref();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return Err(Error::InvalidArgument("parity-check matrix has full column rank, so the code is trivial".into()));
        }
        // One null-space basis vector per free column: x_f = 1 and the pivot
        // entries read off the reduced rows.
        let mut generator = BinaryMatrix::zeros(free.len(), n)?;
        for (row, &f) in free.iter().enumerate() {
            generator.set(row, f, 1);
            for (r, &p) in pivots.iter().enumerate() {
                generator.set(row, p, reduced[r][f]);
            }
        }
        let graph = TannerGraph::build(&h);
        let code = LinearCode {
            h,
            generator,
            info_positions: free,
            graph,
        };
        debug_assert!(code.h.mul_transpose(&code.generator).unwrap().is_zero());
        Ok(code)
    }

    pub fn h(&self) -> &BinaryMatrix {
        &self.h
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.generator
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Block length N.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Information length K = N − rank(H).
    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    /// Number of rows of H (checks), which may exceed N − K for redundant H.
    pub fn m_checks(&self) -> usize {
        self.h.rows()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>> {
        self.h.mul_vec(word)
    }

    pub fn is_codeword(&self, word: &[u8]) -> Result<bool> {
        if word.len() != self.n() {
            return Err(Error::Length {
                expected: self.n(),
                got: word.len(),
            });
        }
        let g = &self.graph;
        Ok((0..g.num_checks()).all(|c| {
            g.check_edges(c)
                .iter()
                .fold(0u8, |acc, &e| acc ^ word[g.edge_var(e as usize)])
                == 0
        }))
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::Length {
                expected: self.k(),
                got: info.len(),
            });
        }
        let mut word = vec![0u8; self.n()];
        for (i, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                for (w, &g) in word.iter_mut().zip(self.generator.row(i)) {
                    *w ^= g;
                }
            }
        }
        Ok(word)
    }

    /// Every codeword, in order of the info vector read as a binary number
    /// (bit 0 of the index is info bit 0). Only sensible for small K.
    pub fn codebook(&self) -> Result<Vec<Vec<u8>>> {
        let k = self.k();
        if k > 20 {
            return Err(Error::Unsupported(format!("codebook enumeration with K = {k} > 20")));
        }
        (0..1usize << k)
            .map(|idx| {
                let info: Vec<u8> = (0..k).map(|i| ((idx >> i) & 1) as u8).collect();
                self.encode(&info)
            })
            .collect()
    }

    /// SHA-256 of the canonical alist rendering of H, hex encoded.
    pub fn h_hash(&self) -> String {
        hex::encode(Sha256::digest(emit_alist(&self.h).as_bytes()))
    }
}

/// Parity-check matrix of the cyclic code of length `n` generated by `g`:
/// the n − k cyclic shifts of the reversed parity polynomial (xⁿ − 1)/g(x).
pub fn cyclic_parity_matrix(g: &Gf2Poly, n: usize) -> Result<BinaryMatrix> {
    let (h_poly, rem) = Gf2Poly::x_n_minus_one(n).div_rem(g)?;
    if !rem.is_zero() {
        return Err(Error::InvalidArgument(format!("{g:?} does not divide x^{n} - 1")));
    }
    let k = h_poly.degree().expect("quotient of nonzero polynomials");
    let r = n - k;
    if r == 0 {
        return Err(Error::InvalidArgument("generator of degree 0 gives no checks".into()));
    }
    let rev = h_poly.reciprocal();
    let mut h = BinaryMatrix::zeros(r, n)?;
    for row in 0..r {
        for j in 0..=k {
            h.set(row, row + j, rev.coeff(j));
        }
    }
    Ok(h)
}

/// All n cyclic shifts of the reversed parity polynomial: a redundant
/// circulant H whose Tanner graph is invariant under cyclic relabeling.
pub fn circulant_parity_matrix(g: &Gf2Poly, n: usize) -> Result<BinaryMatrix> {
    let base = cyclic_parity_matrix(g, n)?;
    let mut h = BinaryMatrix::zeros(n, n)?;
    for row in 0..n {
        for j in 0..n {
            h.set(row, (row + j) % n, base.get(0, j));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::gf2m::{bch_generator_poly, Gf2mField};

    fn hamming_columns() -> LinearCode {
        let h = BinaryMatrix::from_row_support(7, &[vec![0, 2, 4, 6], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap();
        LinearCode::new(h).unwrap()
    }

    #[test]
    fn syndrome_basics() {
        let code = hamming_columns();
        assert_eq!(code.syndrome(&[0; 7]).unwrap(), vec![0, 0, 0]);
        assert!(code.is_codeword(&[0; 7]).unwrap());
        let mut e1 = [0u8; 7];
        e1[0] = 1;
        assert_eq!(code.syndrome(&e1).unwrap(), vec![1, 0, 0]);
        assert!(!code.is_codeword(&e1).unwrap());
        assert!(code.is_codeword(&[0; 6]).is_err());
        assert!(code.syndrome(&[0; 8]).is_err());
    }

    #[test]
    fn encoder_rows_and_codebook() {
        let code = hamming_columns();
        assert_eq!(code.k(), 4);
        assert_eq!(code.encode(&[0; 4]).unwrap(), vec![0; 7]);
        for i in 0..4 {
            let mut info = [0u8; 4];
            info[i] = 1;
            assert_eq!(code.encode(&info).unwrap(), code.generator().row(i));
        }
        assert!(code.encode(&[0; 3]).is_err());
        let book = code.codebook().unwrap();
        assert_eq!(book.len(), 16);
        let distinct: std::collections::HashSet<_> = book.iter().collect();
        assert_eq!(distinct.len(), 16);
        assert!(book.iter().all(|c| code.is_codeword(c).unwrap()));
        // systematic in the recorded info positions
        for (idx, c) in book.iter().enumerate() {
            for (i, &p) in code.info_positions().iter().enumerate() {
                assert_eq!(c[p], ((idx >> i) & 1) as u8);
            }
        }
    }

    #[test]
    fn cyclic_bch_15_11_exhaustive() {
        let g = Gf2Poly::from_bits(0b10011);
        let h = cyclic_parity_matrix(&g, 15).unwrap();
        assert_eq!((h.rows(), h.cols()), (4, 15));
        let code = LinearCode::new(h).unwrap();
        assert_eq!(code.k(), 11);
        // codewords generated as a(x) g(x), independent of the H-based encoder
        for a in 0u128..(1 << 11) {
            let c = Gf2Poly::from_bits(a).mul(&g);
            let word: Vec<u8> = (0..15).map(|i| c.coeff(i)).collect();
            assert!(code.is_codeword(&word).unwrap());
        }
    }

    #[test]
    fn single_parity_check_from_x_plus_one() {
        let h = cyclic_parity_matrix(&Gf2Poly::from_bits(0b11), 3).unwrap();
        assert_eq!(h.row(0), &[1, 1, 1]);
        assert_eq!(h.rows(), 1);
    }

    #[test]
    fn non_divisor_rejected() {
        // x^4+x+1 does not divide x^7 - 1
        assert!(cyclic_parity_matrix(&Gf2Poly::from_bits(0b10011), 7).is_err());
        assert!(cyclic_parity_matrix(&Gf2Poly::x_n_minus_one(5), 7).is_err());
    }

    #[test]
    fn rank_nullity_and_orthogonality() {
        for (m, t) in [(3, 1), (4, 1), (4, 2), (5, 2), (6, 3), (6, 5)] {
            let f = Gf2mField::new(m).unwrap();
            let g = bch_generator_poly(&f, t).unwrap();
            let n = f.order();
            for h in [cyclic_parity_matrix(&g, n).unwrap(), circulant_parity_matrix(&g, n).unwrap()] {
                let code = LinearCode::new(h.clone()).unwrap();
                assert_eq!(code.k() + h.rank(), n);
                assert_eq!(code.k(), n - g.degree().unwrap());
                assert!(h.mul_transpose(code.generator()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn hash_is_stable() {
        let a = hamming_columns();
        let b = hamming_columns();
        assert_eq!(a.h_hash(), b.h_hash());
        assert_eq!(a.h_hash().len(), 64);
    }
}
