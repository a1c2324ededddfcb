use super::matrix::BinaryMatrix;

/// Tanner graph of a parity-check matrix. Edges are numbered in ascending
/// (check, variable) order, so edge `e` of a given matrix always denotes the
/// same one of H; learned per-edge tensors rely on this numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    edge_check: Vec<u32>,
    edge_var: Vec<u32>,
    var_edges: Vec<Vec<u32>>,
    check_edges: Vec<Vec<u32>>,
}

impl TannerGraph {
    pub fn build(h: &BinaryMatrix) -> TannerGraph {
        let (m, n) = (h.rows(), h.cols());
        let mut g = TannerGraph {
            n,
            m,
            edge_check: Vec::new(),
            edge_var: Vec::new(),
            var_edges: vec![Vec::new(); n],
            check_edges: vec![Vec::new(); m],
        };
        for c in 0..m {
            for v in 0..n {
                if h.get(c, v) == 1 {
                    let e = g.edge_check.len() as u32;
                    g.edge_check.push(c as u32);
                    g.edge_var.push(v as u32);
                    g.var_edges[v].push(e);
                    g.check_edges[c].push(e);
                }
            }
        }
        g
    }

    /// Number of variable nodes (block length).
    #[inline]
    pub fn num_vars(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_checks(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// (check, variable) of edge `e`.
    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        (self.edge_check[e] as usize, self.edge_var[e] as usize)
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e] as usize
    }

    #[inline]
    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e] as usize
    }

    /// Edges incident to variable `v`, ascending.
    #[inline]
    pub fn var_edges(&self, v: usize) -> &[u32] {
        &self.var_edges[v]
    }

    /// Edges incident to check `c`, ascending.
    #[inline]
    pub fn check_edges(&self, c: usize) -> &[u32] {
        &self.check_edges[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_edges[v].len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_edges[c].len()
    }

    /// Number of ordered pairs (e, e') of distinct edges sharing a variable,
    /// i.e. Σ_v d_v (d_v − 1). Size of a pair-indexed weight layer.
    pub fn num_var_edge_pairs(&self) -> usize {
        self.var_edges.iter().map(|l| l.len() * l.len().saturating_sub(1)).sum()
    }

    /// For each edge e, the offset of its first pair slot; pairs of edge e
    /// are its variable's other edges in ascending order.
    pub fn pair_offsets(&self) -> Vec<usize> {
        let mut offsets = vec![0; self.num_edges()];
        let mut acc = 0;
        for v in 0..self.n {
            let d = self.var_edges[v].len();
            for &e in &self.var_edges[v] {
                offsets[e as usize] = acc;
                acc += d - 1;
            }
        }
        offsets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming() -> BinaryMatrix {
        BinaryMatrix::from_row_support(7, &[vec![0, 2, 4, 6], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]).unwrap()
    }

    #[test]
    fn hamming_graph() {
        let g = TannerGraph::build(&hamming());
        assert_eq!(g.num_edges(), 12);
        assert_eq!(g.var_degree(6), 3);
        assert_eq!(g.edge(0), (0, 0));
        assert_eq!(g.edge(4), (1, 1));
        for e in 1..g.num_edges() {
            assert!(g.edge(e - 1) < g.edge(e));
        }
        // every edge in exactly one variable list and one check list
        let mut seen_v = vec![0; 12];
        let mut seen_c = vec![0; 12];
        for v in 0..7 {
            for &e in g.var_edges(v) {
                assert_eq!(g.edge_var(e as usize), v);
                seen_v[e as usize] += 1;
            }
        }
        for c in 0..3 {
            for &e in g.check_edges(c) {
                assert_eq!(g.edge_check(e as usize), c);
                seen_c[e as usize] += 1;
            }
        }
        assert!(seen_v.iter().chain(&seen_c).all(|&k| k == 1));
        assert_eq!(g, TannerGraph::build(&hamming()));
    }

    #[test]
    fn single_row_and_identity() {
        let row = BinaryMatrix::from_dense(1, 3, &[1, 1, 1]).unwrap();
        let g = TannerGraph::build(&row);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.check_degree(0), 3);

        let id = BinaryMatrix::identity(4).unwrap();
        let g = TannerGraph::build(&id);
        assert_eq!(g.num_edges(), 4);
        assert!((0..4).all(|v| g.var_degree(v) == 1 && g.check_degree(v) == 1));
        assert_eq!(g.num_var_edge_pairs(), 0);
    }

    #[test]
    fn pair_offsets_cover_pairs() {
        let g = TannerGraph::build(&hamming());
        let offs = g.pair_offsets();
        assert_eq!(g.num_var_edge_pairs(), 3 * 2 + 3 * 2);
        let last = g.var_edges(6).last().copied().unwrap() as usize;
        assert_eq!(offs[last] + g.var_degree(6) - 1, g.num_var_edge_pairs());
    }
}
