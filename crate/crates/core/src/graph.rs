//! Undirected graphs, Erdős–Rényi generators and degree statistics.
//!
//! Degrees follow the self-counting convention: `degree(i)` is one plus the
//! number of neighbors of `i`. Self-loops are never stored.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Simple undirected graph over nodes `0..n`, stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: alloc::vec![Vec::new(); n] }
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Graph { adjacency }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path edges are in range")
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; needs `n >= 3` to be a proper cycle.
    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges).expect("cycle edges are in range")
    }

    /// Builds a graph from 0-based edges. Self-loops and duplicates are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(l, k) in edges {
            g.add_edge(l, k)?;
        }
        Ok(g)
    }

    /// Inserts the undirected edge `{l, k}`. Returns whether it was new.
    pub fn add_edge(&mut self, l: usize, k: usize) -> Result<bool> {
        let n = self.n();
        for index in [l, k] {
            if index >= n {
                return Err(Error::NodeOutOfRange { index, n });
            }
        }
        if l == k {
            return Ok(false);
        }
        match self.adjacency[l].binary_search(&k) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adjacency[l].insert(pos, k);
                let pos = self.adjacency[k].binary_search(&l).unwrap_err();
                self.adjacency[k].insert(pos, l);
                Ok(true)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, l: usize, k: usize) -> bool {
        l != k && self.adjacency[l].binary_search(&k).is_ok()
    }

    /// Neighbors of `i` in increasing order, excluding `i` itself.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Self-counting degree: `1 + |neighbors(i)|`.
    pub fn degree(&self, i: usize) -> usize {
        1 + self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(l, k)` with `l < k`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(l, nbrs)| nbrs.iter().filter(move |&&k| k > l).map(move |&k| (l, k)))
    }

    /// Subgraph induced by `s`, relabelled to `0..|s|` in the order of `s`.
    pub fn induced(&self, s: &ObservationSet) -> Graph {
        let mut sub = Graph::empty(s.len());
        for (a, &l) in s.indices().iter().enumerate() {
            for &k in self.neighbors(l) {
                if let Some(b) = s.position(k) {
                    if a < b {
                        sub.add_edge(a, b).expect("positions are in range");
                    }
                }
            }
        }
        sub
    }
}

/// Connection-probability scaling laws for the Erdős–Rényi ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Constant probability `p`, average degree growing like `N p`.
    Dense { p: f64 },
    /// `p = c log(N) / N` with `c > 1`.
    LogSparse { c: f64 },
    /// `p = (log N)^(1 + exponent) / N`, i.e. `omega_N = (log N)^exponent`.
    IntermediateSparse { exponent: f64 },
}

impl Regime {
    pub const DEFAULT_LOG_SPARSE_C: f64 = 2.0;
    pub const DEFAULT_INTERMEDIATE_EXPONENT: f64 = 0.5;

    pub fn validate(&self) -> Result<()> {
        match *self {
            Regime::Dense { p } if !(p > 0.0 && p <= 1.0) => Err(Error::InvalidParameter {
                name: "p",
                reason: "dense-regime probability must lie in (0, 1]",
            }),
            Regime::LogSparse { c } if !(c > 1.0 && c.is_finite()) => Err(Error::InvalidParameter {
                name: "c",
                reason: "log-sparse multiplier must exceed 1",
            }),
            Regime::IntermediateSparse { exponent } if !(exponent > 0.0 && exponent.is_finite()) => {
                Err(Error::InvalidParameter {
                    name: "exponent",
                    reason: "intermediate-sparse exponent must be positive",
                })
            }
            _ => Ok(()),
        }
    }

    /// Connection probability `p(n)` for this regime.
    pub fn probability(&self, n: usize) -> Result<f64> {
        self.validate()?;
        if n < 2 {
            return Err(Error::InvalidParameter { name: "n", reason: "regimes need at least 2 nodes" });
        }
        let nf = n as f64;
        let p = match *self {
            Regime::Dense { p } => p,
            Regime::LogSparse { c } => c * libm::log(nf) / nf,
            Regime::IntermediateSparse { exponent } => libm::pow(libm::log(nf), 1.0 + exponent) / nf,
        };
        Ok(p.min(1.0))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Dense { .. } => "dense",
            Regime::LogSparse { .. } => "log-sparse",
            Regime::IntermediateSparse { .. } => "intermediate-sparse",
        }
    }

    /// Limiting connection probability as `N` grows: `p` when dense, zero otherwise.
    pub fn limiting_probability(&self) -> f64 {
        match *self {
            Regime::Dense { p } => p,
            _ => 0.0,
        }
    }
}

/// Free-function form of [`Regime::probability`].
pub fn regime_probability(regime: &Regime, n: usize) -> Result<f64> {
    regime.probability(n)
}

/// The probed subset `S`: strictly increasing 0-based node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservationSet {
    indices: Vec<usize>,
}

impl ObservationSet {
    /// Validates and sorts; duplicates and out-of-range indices are rejected.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.is_empty() {
            return Err(Error::InvalidParameter { name: "S", reason: "observation set is empty" });
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter { name: "S", reason: "duplicate node in observation set" });
        }
        if let Some(&index) = indices.last().filter(|&&i| i >= n) {
            return Err(Error::NodeOutOfRange { index, n });
        }
        Ok(ObservationSet { indices })
    }

    /// `{0, .., k-1}`.
    pub fn first(k: usize) -> Self {
        assert!(k >= 1, "observation set must be nonempty");
        ObservationSet { indices: (0..k).collect() }
    }

    pub fn full(n: usize) -> Self {
        Self::first(n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.indices.binary_search(&node).is_ok()
    }

    /// Position of `node` inside `S`, if probed.
    pub fn position(&self, node: usize) -> Option<usize> {
        self.indices.binary_search(&node).ok()
    }

    /// The latent nodes `S'` among `0..n`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.contains(*i)).collect()
    }

    pub fn union(&self, other: &ObservationSet) -> ObservationSet {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        indices.sort_unstable();
        indices.dedup();
        ObservationSet { indices }
    }

    /// Fraction `|S| / n`.
    pub fn fraction(&self, n: usize) -> f64 {
        self.len() as f64 / n as f64
    }
}

impl fmt::Display for ObservationSet {
    /// Comma-separated 1-based labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "p", reason: "probability must lie in [0, 1]" })
    }
}

#[inline]
fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Erdős–Rényi graph: every unordered pair is an edge independently with
/// probability `p`. Pairs are visited in lexicographic order, one uniform draw
/// each, so the result is a pure function of `(n, p, rng state)`.
pub fn gen_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", reason: "graph needs at least one node" });
    }
    let mut adjacency = alloc::vec![Vec::new(); n];
    for l in 0..n {
        for k in (l + 1)..n {
            if bernoulli(rng, p) {
                adjacency[l].push(k);
                adjacency[k].push(l);
            }
        }
    }
    // Pushes happen in increasing order for both endpoints, so lists are sorted.
    Ok(Graph { adjacency })
}

/// Partial Erdős–Rényi graph: the subgraph `s_graph` is copied onto nodes
/// `0..|S|`, while all pairs touching the latent nodes are Bernoulli(`p`).
pub fn gen_partial_er<R: Rng + ?Sized>(
    s_graph: &Graph,
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<(Graph, ObservationSet)> {
    check_probability(p)?;
    let s = s_graph.n();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter { name: "n", reason: "probed subgraph must have between 1 and n nodes" });
    }
    let mut adjacency = alloc::vec![Vec::new(); n];
    for l in 0..n {
        for k in (l + 1)..n {
            let edge = if k < s { s_graph.has_edge(l, k) } else { bernoulli(rng, p) };
            if edge {
                adjacency[l].push(k);
                adjacency[k].push(l);
            }
        }
    }
    Ok((Graph { adjacency }, ObservationSet::first(s)))
}

/// Minimum, maximum and mean of the self-counting degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let degrees = g.degrees();
    let min = degrees.iter().copied().min().unwrap_or(0);
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mean = degrees.iter().sum::<usize>() as f64 / degrees.len().max(1) as f64;
    DegreeStats { min, max, mean }
}

/// Ensemble average degree `1 + (n - 1) p`.
pub fn expected_degree(n: usize, p: f64) -> f64 {
    1.0 + (n as f64 - 1.0) * p
}
