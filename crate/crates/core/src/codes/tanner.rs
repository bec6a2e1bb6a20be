//! Bipartite check/variable graph of a parity-check matrix.

use crate::bits::{BitMatrix, BitVec};

/// Edges are numbered row-major: all edges of check 0 in increasing column
/// order, then check 1, and so on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    num_vars: usize,
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn new(h: &BitMatrix) -> Self {
        let mut check_start = Vec::with_capacity(h.num_rows() + 1);
        let mut edge_var = Vec::with_capacity(h.count_ones());
        let mut var_edges = vec![Vec::new(); h.num_cols()];
        check_start.push(0);
        for r in h.rows() {
            for v in r.ones() {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            check_start.push(edge_var.len());
        }
        TannerGraph {
            num_vars: h.num_cols(),
            check_start,
            edge_var,
            var_edges,
        }
    }

    #[inline]
    pub fn num_checks(&self) -> usize {
        self.check_start.len() - 1
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Edge index range of check `c`.
    #[inline]
    pub fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_start[c]..self.check_start[c + 1]
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    #[inline]
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    /// `H e^T` for a candidate error.
    pub fn syndrome(&self, e: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.num_checks());
        for c in 0..self.num_checks() {
            let mut parity = false;
            for ei in self.check_edges(c) {
                parity ^= e.get(self.edge_var[ei]);
            }
            if parity {
                s.set(c, true);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_count_matches_ones() {
        let h = BitMatrix::from_strs(&["1010101", "0110011", "0001111"]);
        let g = TannerGraph::new(&h);
        assert_eq!(g.num_edges(), h.count_ones());
        assert_eq!(g.var_edges(6).len(), 3);
        let e = BitVec::from_str01("0000001");
        assert_eq!(g.syndrome(&e), h.mul_vec(&e));
    }
}
