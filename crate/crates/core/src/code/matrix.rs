use std::fmt;

use crate::error::{Error, Result};

/// Dense binary matrix stored row-major, one byte per entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BinaryMatrix {
    /// All-zero matrix. Both dimensions must be nonzero.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Ok(BinaryMatrix {
            rows,
            cols,
            bits: vec![0; rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries, each of which must be 0 or 1.
    pub fn from_dense(rows: usize, cols: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::Length {
                expected: rows * cols,
                got: bits.len(),
            });
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("entry {b} is not binary")));
        }
        let mut m = Self::zeros(rows, cols)?;
        m.bits.copy_from_slice(bits);
        Ok(m)
    }

    /// Builds a matrix from rows given as lists of 0-based column indices.
    pub fn from_row_support(cols: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols)?;
        for (r, support) in rows.iter().enumerate() {
            for &c in support {
                if c >= cols {
                    return Err(Error::InvalidArgument(format!(
                        "column index {c} out of range for {cols} columns"
                    )));
                }
                m.set(r, c, 1);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.bits[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.bits[r * self.cols + c] = v & 1;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().map(|&b| b as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).map(|r| self.get(r, c) as usize).sum()
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix {
            rows: self.cols,
            cols: self.rows,
            bits: vec![0; self.bits.len()],
        };
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `self · v` over GF(2).
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::Length {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u8, |acc, (&a, &b)| acc ^ (a & b))
            })
            .collect())
    }

    /// `self · otherᵀ` over GF(2).
    pub fn mul_transpose(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by transpose of {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BinaryMatrix::zeros(self.rows, other.rows)?;
        for i in 0..self.rows {
            for j in 0..other.rows {
                let dot = self
                    .row(i)
                    .iter()
                    .zip(other.row(j))
                    .fold(0u8, |acc, (&a, &b)| acc ^ (a & b));
                out.set(i, j, dot);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Reduced row echelon form over GF(2). Returns the reduced matrix (zero
    /// rows dropped) and the pivot column of each remaining row.
    pub fn rref(&self) -> (Vec<Vec<u8>>, Vec<usize>) {
        let mut rows: Vec<Vec<u8>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            if lead == rows.len() {
                break;
            }
            let Some(p) = (lead..rows.len()).find(|&r| rows[r][col] == 1) else {
                continue;
            };
            rows.swap(lead, p);
            let pivot_row = rows[lead].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != lead && row[col] == 1 {
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        rows.truncate(lead);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = self.row(r).iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_duplicates() {
        let id = BinaryMatrix::identity(4).unwrap();
        assert_eq!(id.rank(), 4);
        let dup = BinaryMatrix::from_dense(3, 3, &[1, 1, 0, 1, 1, 0, 0, 0, 1]).unwrap();
        assert_eq!(dup.rank(), 2);
    }

    #[test]
    fn rejects_non_binary_and_empty() {
        assert!(BinaryMatrix::from_dense(1, 2, &[0, 2]).is_err());
        assert!(BinaryMatrix::zeros(0, 3).is_err());
        assert!(BinaryMatrix::zeros(3, 0).is_err());
    }

    #[test]
    fn mul_vec_checks_length() {
        let id = BinaryMatrix::identity(3).unwrap();
        assert_eq!(id.mul_vec(&[1, 0, 1]).unwrap(), vec![1, 0, 1]);
        assert!(id.mul_vec(&[1, 0]).is_err());
    }
}
