//! Reading and writing parity-check matrices in the alist text format.
//!
//! Layout: `N M`, then the maximum column and row degrees, then the N column
//! degrees and the M row degrees, then one line per column listing its
//! 1-based row indices and one line per row listing its 1-based column
//! indices. Lists may be padded with zeros up to the maximum degree.

use std::fmt::Write as _;

use super::matrix::BinaryMatrix;
use crate::error::{Error, Result};

fn alist_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Alist {
        line,
        msg: msg.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next line (1-based number, content); blank lines are returned as-is.
    fn next_raw(&mut self) -> Option<(usize, &'a str)> {
        let (i, l) = self.inner.next()?;
        self.last = i + 1;
        Some((i + 1, l.trim()))
    }

    fn next_nonblank(&mut self) -> Option<(usize, &'a str)> {
        loop {
            let (n, l) = self.next_raw()?;
            if !l.is_empty() {
                return Some((n, l));
            }
        }
    }

    fn numbers(&mut self, what: &str, count: usize) -> Result<(usize, Vec<usize>)> {
        let (n, l) = self
            .next_nonblank()
            .ok_or_else(|| alist_err(self.last + 1, format!("unexpected end of input, expected {what}")))?;
        let nums = parse_numbers(n, l)?;
        if nums.len() != count {
            return Err(alist_err(
                n,
                format!("expected {count} values for {what}, found {}", nums.len()),
            ));
        }
        Ok((n, nums))
    }

    /// One adjacency list. A blank line is an empty list only when the
    /// expected degree is zero; otherwise blank lines are skipped.
    fn index_list(&mut self, expected_degree: usize, what: &str) -> Result<(usize, Vec<usize>)> {
        loop {
            let (n, l) = self
                .next_raw()
                .ok_or_else(|| alist_err(self.last + 1, format!("unexpected end of input in {what}")))?;
            if l.is_empty() && expected_degree > 0 {
                continue;
            }
            let nums = parse_numbers(n, l)?;
            return Ok((n, nums.into_iter().filter(|&x| x != 0).collect()));
        }
    }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| alist_err(line, format!("invalid integer '{tok}'")))
        })
        .collect()
}

/// Parses alist text into a matrix with rows = checks and columns = variables.
pub fn parse_alist(text: &str) -> Result<BinaryMatrix> {
    let mut lines = Lines::new(text);
    let (hline, header) = lines.numbers("header 'N M'", 2)?;
    let (n, m) = (header[0], header[1]);
    if n == 0 || m == 0 {
        return Err(alist_err(hline, "N and M must be positive"));
    }
    let (dline, maxdeg) = lines.numbers("maximum degrees", 2)?;
    let (max_col, max_row) = (maxdeg[0], maxdeg[1]);
    let (cdline, col_deg) = lines.numbers("column degrees", n)?;
    let (rdline, row_deg) = lines.numbers("row degrees", m)?;
    if let Some(&d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(alist_err(cdline, format!("column degree {d} exceeds declared maximum {max_col}")));
    }
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(alist_err(rdline, format!("row degree {d} exceeds declared maximum {max_row}")));
    }
    if col_deg.iter().sum::<usize>() != row_deg.iter().sum::<usize>() {
        return Err(alist_err(dline, "column and row degree totals differ"));
    }

    let mut h = BinaryMatrix::zeros(m, n)?;
    for (c, &deg) in col_deg.iter().enumerate() {
        let (ln, idx) = lines.index_list(deg, "column lists")?;
        if idx.len() != deg {
            return Err(alist_err(ln, format!("column {} lists {} entries, degree header says {deg}", c + 1, idx.len())));
        }
        for r in idx {
            if r > m {
                return Err(alist_err(ln, format!("row index {r} out of range 1..={m}")));
            }
            if h.get(r - 1, c) == 1 {
                return Err(alist_err(ln, format!("duplicate row index {r} in column {}", c + 1)));
            }
            h.set(r - 1, c, 1);
        }
    }
    for (r, &deg) in row_deg.iter().enumerate() {
        let (ln, idx) = lines.index_list(deg, "row lists")?;
        if idx.len() != deg {
            return Err(alist_err(ln, format!("row {} lists {} entries, degree header says {deg}", r + 1, idx.len())));
        }
        for c in idx {
            if c > n {
                return Err(alist_err(ln, format!("column index {c} out of range 1..={n}")));
            }
            if h.get(r, c - 1) != 1 {
                return Err(alist_err(
                    ln,
                    format!("row {} lists column {c} which the column lists do not contain", r + 1),
                ));
            }
        }
    }
    Ok(h)
}

/// Writes a matrix in alist format, zero-padding every list to the maximum degree.
pub fn emit_alist(h: &BinaryMatrix) -> String {
    let (m, n) = (h.rows(), h.cols());
    let col_lists: Vec<Vec<usize>> = (0..n)
        .map(|c| (0..m).filter(|&r| h.get(r, c) == 1).map(|r| r + 1).collect())
        .collect();
    let row_lists: Vec<Vec<usize>> = (0..m)
        .map(|r| (0..n).filter(|&c| h.get(r, c) == 1).map(|c| c + 1).collect())
        .collect();
    let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);

    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut col_lists.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut row_lists.iter().map(Vec::len)));
    for (lists, width) in [(&col_lists, max_col), (&row_lists, max_row)] {
        for l in lists.iter() {
            let padded = l.iter().copied().chain(std::iter::repeat(0)).take(width);
            let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const HAMMING_ALIST: &str = "7 3
3 4
1 1 2 1 2 2 3
4 4 4
1 0 0
2 0 0
1 2 0
3 0 0
1 3 0
2 3 0
1 2 3
1 3 5 7
2 3 6 7
4 5 6 7
";

    #[test]
    fn parses_hamming() {
        let h = parse_alist(HAMMING_ALIST).unwrap();
        assert_eq!((h.rows(), h.cols()), (3, 7));
        assert_eq!(h.count_ones(), 12);
        assert_eq!(h.row(0), &[1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(h.row(2), &[0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn index_out_of_range_reports_line() {
        let bad = HAMMING_ALIST.replace("4 5 6 7", "4 5 6 8");
        match parse_alist(&bad) {
            Err(Error::Alist { line, msg }) => {
                assert_eq!(line, 14);
                assert!(msg.contains("out of range"), "{msg}");
            }
            other => panic!("expected alist error, got {other:?}"),
        }
        let bad_col = HAMMING_ALIST.replace("1 2 3\n1 3 5 7", "1 2 4\n1 3 5 7");
        assert!(matches!(parse_alist(&bad_col), Err(Error::Alist { line: 11, .. })));
    }

    #[test]
    fn degree_mismatch_and_bad_header() {
        let bad = HAMMING_ALIST.replacen("1 1 2 1 2 2 3", "1 1 2 1 2 2 2", 1);
        assert!(matches!(parse_alist(&bad), Err(Error::Alist { line: 2..=3, .. })));
        assert!(matches!(parse_alist("7\n"), Err(Error::Alist { line: 1, .. })));
        assert!(matches!(parse_alist("x y\n"), Err(Error::Alist { line: 1, .. })));
        assert!(matches!(parse_alist("7 3\n3 4\n"), Err(Error::Alist { .. })));
    }

    #[test]
    fn emits_degenerate_matrices() {
        let one = BinaryMatrix::from_dense(1, 1, &[1]).unwrap();
        let text = emit_alist(&one);
        assert_eq!(text, "1 1\n1 1\n1\n1\n1\n1\n");
        assert_eq!(parse_alist(&text).unwrap(), one);

        let zero = BinaryMatrix::zeros(2, 2).unwrap();
        let text = emit_alist(&zero);
        assert!(text.starts_with("2 2\n0 0\n0 0\n0 0\n"));
        assert_eq!(parse_alist(&text).unwrap(), zero);
    }

    #[test]
    fn hamming_round_trip() {
        let h = parse_alist(HAMMING_ALIST).unwrap();
        assert_eq!(parse_alist(&emit_alist(&h)).unwrap(), h);
    }

    proptest! {
        #[test]
        fn round_trip_random(seed in any::<u64>(), density in 0.05f64..0.9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bits: Vec<u8> = (0..200).map(|_| rng.gen_bool(density) as u8).collect();
            let h = BinaryMatrix::from_dense(10, 20, &bits).unwrap();
            prop_assert_eq!(parse_alist(&emit_alist(&h)).unwrap(), h);
        }
    }
}
