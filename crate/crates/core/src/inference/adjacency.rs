use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::graph::{Graph, ObservationSet};

/// Ordered-pair adjacency over a probed set of size `n` (local indices).
/// Diagonal entries are always `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Adjacency {
    n: usize,
    bits: Vec<bool>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency { n, bits: alloc::vec![false; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = Self::empty(n);
        for l in 0..n {
            for k in 0..n {
                if l != k && f(l, k) {
                    adj.bits[l * n + k] = true;
                }
            }
        }
        adj
    }

    /// True subgraph of `g` induced by `s`.
    pub fn from_graph(g: &Graph, s: &ObservationSet) -> Self {
        let idx = s.indices();
        Self::from_fn(idx.len(), |l, k| g.has_edge(idx[l], idx[k]))
    }

    /// Support of a matrix's off-diagonal entries.
    pub fn from_support(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |l, k| m[(l, k)] != 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: usize, k: usize) -> bool {
        self.bits[l * self.n + k]
    }

    pub fn set(&mut self, l: usize, k: usize, value: bool) {
        if l != k {
            self.bits[l * self.n + k] = value;
        }
    }

    /// Ordered off-diagonal pairs declared connected.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|l| (l + 1..self.n).all(|k| self.get(l, k) == self.get(k, l)))
    }

    /// Undirected edges `(l, k)`, `l < k`, with either direction set.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in 0..self.n {
            for k in (l + 1)..self.n {
                if self.get(l, k) || self.get(k, l) {
                    out.push((l, k));
                }
            }
        }
        out
    }

    /// Undirected graph on local indices (OR-symmetrized).
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n, &self.undirected_edges()).expect("local indices are in range")
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.n, |l, k| !self.get(l, k))
    }
}
