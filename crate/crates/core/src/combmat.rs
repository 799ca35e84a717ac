//! Combination matrices: nonnegative, symmetric, every column summing to
//! `rho < 1`, supported on a graph.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph, ObservationSet};

/// Tolerance used when validating column sums and symmetry.
pub const COLUMN_SUM_TOL: f64 = 1e-12;

/// Symmetric combination matrix in compressed-row form (diagonal included).
///
/// Because the matrix is symmetric, row `i` doubles as column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    n: usize,
    rho: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "rho", reason: "must lie in (0, 1)" })
    }
}

impl CombinationMatrix {
    /// Builds from per-node off-diagonal weights; the diagonal completes each
    /// column to `rho`.
    fn from_graph_weights(g: &Graph, rho: f64, weight: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = g.n();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(n + 2 * g.edge_count());
        let mut vals = Vec::with_capacity(n + 2 * g.edge_count());
        row_ptr.push(0);
        for k in 0..n {
            let nbrs = g.neighbors(k);
            let off: Vec<f64> = nbrs.iter().map(|&l| weight(l, k)).collect();
            let self_weight = rho - off.iter().sum::<f64>();
            if self_weight < -COLUMN_SUM_TOL {
                return Err(Error::InvalidMatrix("negative self-weight"));
            }
            let split = nbrs.partition_point(|&l| l < k);
            for (idx, &l) in nbrs.iter().enumerate() {
                if idx == split {
                    cols.push(k);
                    vals.push(self_weight.max(0.0));
                }
                cols.push(l);
                vals.push(off[idx]);
            }
            if split == nbrs.len() {
                cols.push(k);
                vals.push(self_weight.max(0.0));
            }
            row_ptr.push(cols.len());
        }
        Ok(CombinationMatrix { n, rho, row_ptr, cols, vals })
    }

    /// Validates a dense matrix: square, nonnegative, symmetric within
    /// [`COLUMN_SUM_TOL`], equal column sums `rho` with `0 <= rho < 1`.
    /// The zero matrix is accepted with `rho = 0`.
    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self> {
        Self::from_dense_inner(a, None)
    }

    /// [`from_dense`](Self::from_dense) with a declared `rho`; every column
    /// sum must match it within [`COLUMN_SUM_TOL`].
    pub fn from_dense_with_rho(a: &DMatrix<f64>, rho: f64) -> Result<Self> {
        Self::from_dense_inner(a, Some(rho))
    }

    fn from_dense_inner(a: &DMatrix<f64>, declared: Option<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
        }
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix"));
        }
        if a.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite and nonnegative"));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (a[(i, j)] - a[(j, i)]).abs() > COLUMN_SUM_TOL {
                    return Err(Error::InvalidMatrix("matrix is not symmetric"));
                }
            }
        }
        let sums: Vec<f64> = (0..n).map(|j| a.column(j).sum()).collect();
        let rho = declared.unwrap_or_else(|| sums.iter().sum::<f64>() / n as f64);
        if !(rho >= 0.0) {
            return Err(Error::InvalidMatrix("column sum must be nonnegative"));
        }
        if sums.iter().any(|s| (s - rho).abs() > COLUMN_SUM_TOL) {
            return Err(Error::InvalidMatrix("column sums differ"));
        }
        if !(rho < 1.0) {
            return Err(Error::InvalidMatrix("column sum must be below 1"));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                // symmetrize exactly
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(CombinationMatrix { n, rho, row_ptr, cols, vals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Common column sum.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of row `i` (equivalently column `i`), columns increasing.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Stored entries `(i, j, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            *o = self.cols[range.clone()]
                .iter()
                .zip(&self.vals[range])
                .map(|(&j, &v)| v * x[j])
                .sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        out
    }

    /// `A X` for a dense `n x m` block.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.n, "row count must match matrix dimension");
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            let col = x.column(c);
            let mut dst = out.column_mut(c);
            for i in 0..self.n {
                let range = self.row_ptr[i]..self.row_ptr[i + 1];
                dst[i] = self.cols[range.clone()]
                    .iter()
                    .zip(&self.vals[range])
                    .map(|(&j, &v)| v * col[j])
                    .sum();
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            dense[(i, j)] = v;
        }
        dense
    }

    /// Dense block `[A]_{rows, cols}`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]))
    }

    /// `A_S`, the probed submatrix.
    pub fn submatrix(&self, s: &ObservationSet) -> DMatrix<f64> {
        self.block(s.indices(), s.indices())
    }

    /// Largest deviation of a column sum from `rho`.
    pub fn column_sum_error(&self) -> f64 {
        (0..self.n)
            .map(|i| (self.row(i).map(|(_, v)| v).sum::<f64>() - self.rho).abs())
            .fold(0.0, f64::max)
    }

    /// Errors if a nonzero off-diagonal entry sits on a non-edge of `g`.
    pub fn check_supported(&self, g: &Graph) -> Result<()> {
        if g.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: g.n() });
        }
        for (i, j, v) in self.triplets() {
            if i != j && v != 0.0 && !g.has_edge(i, j) {
                return Err(Error::NotSupported { row: i, col: j });
            }
        }
        Ok(())
    }

    /// Spectral radius by power iteration on `A^2`.
    pub fn spectral_radius(&self, iterations: usize) -> f64 {
        let n = self.n;
        // deterministic, non-degenerate start
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0).collect();
        let mut tmp = alloc::vec![0.0; n];
        let mut y = alloc::vec![0.0; n];
        let mut estimate = 0.0;
        for _ in 0..iterations.max(1) {
            let norm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
            if norm == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= norm);
            self.matvec_into(&x, &mut tmp);
            self.matvec_into(&tmp, &mut y);
            let quotient: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            estimate = libm::sqrt(quotient.max(0.0));
            core::mem::swap(&mut x, &mut y);
        }
        estimate
    }
}

/// Metropolis rule: `a_lk = rho / max(d_l, d_k)` on edges, self-weights
/// complete the columns.
pub fn build_metropolis(g: &Graph, rho: f64) -> Result<CombinationMatrix> {
    check_rho(rho)?;
    let degrees = g.degrees();
    CombinationMatrix::from_graph_weights(g, rho, |l, k| rho / degrees[l].max(degrees[k]) as f64)
}

/// Laplacian rule: `a_lk = rho * lambda / d_max` on edges, self-weights
/// complete the columns.
pub fn build_laplacian(g: &Graph, rho: f64, lambda: f64) -> Result<CombinationMatrix> {
    check_rho(rho)?;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter { name: "lambda", reason: "must lie in (0, 1]" });
    }
    let d_max = degree_stats(g).max as f64;
    let w = rho * lambda / d_max;
    CombinationMatrix::from_graph_weights(g, rho, |_, _| w)
}

/// Doubly-stochastic Metropolis weights (`rho = 1`), as a dense matrix.
pub fn metropolis_weights(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let degrees = g.degrees();
    let mut c = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut total = 0.0;
        for &l in g.neighbors(k) {
            let w = 1.0 / degrees[l].max(degrees[k]) as f64;
            c[(l, k)] = w;
            total += w;
        }
        c[(k, k)] = 1.0 - total;
    }
    c
}

/// Membership report for the regularity classes C1 and C2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassReport {
    pub in_c1: bool,
    /// Witness for `a_lk > tau / d_mean` on connected pairs.
    pub tau: f64,
    pub in_c2: bool,
    /// Witness for `kappa / d_max <= a_lk <= kappa / d_min`; `None` outside C2.
    pub kappa: Option<f64>,
    /// `d_max * min connected entry`: the largest kappa the lower bound allows.
    pub kappa_low: f64,
    /// `d_min * max connected entry`: the smallest kappa the upper bound allows.
    pub kappa_high: f64,
}

/// Class check using the witness `tau = d_mean * min_connected / 2`, so C1
/// reduces to every edge carrying a strictly positive weight.
pub fn check_class(a: &CombinationMatrix, g: &Graph) -> Result<ClassReport> {
    check_class_inner(a, g, None)
}

/// Class check with a caller-chosen C1 witness `tau`.
pub fn check_class_with_tau(a: &CombinationMatrix, g: &Graph, tau: f64) -> Result<ClassReport> {
    check_class_inner(a, g, Some(tau))
}

fn check_class_inner(a: &CombinationMatrix, g: &Graph, tau: Option<f64>) -> Result<ClassReport> {
    a.check_supported(g)?;
    let stats = degree_stats(g);
    let (mut min_conn, mut max_conn) = (f64::INFINITY, f64::NEG_INFINITY);
    for (l, k) in g.edges() {
        let v = a.get(l, k);
        min_conn = min_conn.min(v);
        max_conn = max_conn.max(v);
    }
    let rho = a.rho();
    if g.edge_count() == 0 {
        // no connected pairs: both conditions hold vacuously
        let tau = tau.unwrap_or(0.0);
        return Ok(ClassReport {
            in_c1: true,
            tau,
            in_c2: rho > 0.0,
            kappa: (rho > 0.0).then_some(rho),
            kappa_low: rho,
            kappa_high: 0.0,
        });
    }
    let tau = tau.unwrap_or(0.5 * stats.mean * min_conn);
    let in_c1 = tau > 0.0 && min_conn > tau / stats.mean;

    let kappa_low = stats.max as f64 * min_conn;
    let kappa_high = stats.min as f64 * max_conn;
    let kappa = kappa_low.min(rho);
    let in_c2 = kappa > 0.0 && kappa >= kappa_high - COLUMN_SUM_TOL * rho.max(kappa_high);
    Ok(ClassReport { in_c1, tau, in_c2, kappa: in_c2.then_some(kappa), kappa_low, kappa_high })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_er;
    use crate::rng::rng_from_seed;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn metropolis_path() {
        let a = build_metropolis(&Graph::path(3), 0.5).unwrap();
        assert!(close(a.get(0, 1), 1.0 / 6.0));
        assert!(close(a.get(1, 2), 1.0 / 6.0));
        assert_eq!(a.get(0, 2), 0.0);
        assert!(close(a.get(0, 0), 1.0 / 3.0));
        assert!(close(a.get(2, 2), 1.0 / 3.0));
        assert!(close(a.get(1, 1), 1.0 / 6.0));
        assert!(a.column_sum_error() < 1e-15);
    }

    #[test]
    fn metropolis_complete_graph() {
        let n = 6;
        let a = build_metropolis(&Graph::complete(n), 0.4).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((a.get(i, j) - 0.4 / n as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn edgeless_gives_scaled_identity() {
        let g = Graph::empty(4);
        for a in [build_metropolis(&g, 0.3).unwrap(), build_laplacian(&g, 0.3, 0.5).unwrap()] {
            assert_eq!(a.to_dense(), DMatrix::identity(4, 4) * 0.3);
        }
    }

    #[test]
    fn laplacian_path() {
        let a = build_laplacian(&Graph::path(3), 0.5, 0.6).unwrap();
        assert!(close(a.get(0, 1), 0.1));
        assert!(close(a.get(1, 2), 0.1));
        assert!(close(a.get(0, 0), 0.4));
        assert!(close(a.get(2, 2), 0.4));
        assert!(close(a.get(1, 1), 0.3));
    }

    #[test]
    fn laplacian_equals_metropolis_on_regular_graphs() {
        for g in [Graph::cycle(9), Graph::complete(5)] {
            assert_eq!(build_laplacian(&g, 0.7, 1.0).unwrap(), build_metropolis(&g, 0.7).unwrap());
        }
    }

    #[test]
    fn builders_reject_bad_parameters() {
        let g = Graph::path(3);
        assert!(build_metropolis(&g, 0.0).is_err());
        assert!(build_metropolis(&g, 1.0).is_err());
        assert!(build_laplacian(&g, 0.5, 0.0).is_err());
        assert!(build_laplacian(&g, 0.5, 1.1).is_err());
    }

    #[test]
    fn metropolis_and_laplacian_are_c2() {
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let g = gen_er(40, 0.2, &mut rng).unwrap();
            let r = check_class(&build_metropolis(&g, 0.5).unwrap(), &g).unwrap();
            assert!(r.in_c2 && r.in_c1);
            assert!((r.kappa.unwrap() - 0.5).abs() < 1e-12);
            let r = check_class(&build_laplacian(&g, 0.5, 1.0).unwrap(), &g).unwrap();
            assert!(r.in_c2 && r.in_c1);
        }
    }

    #[test]
    fn shrunken_entry_leaves_c2() {
        // path 0-1-2-3 plus chord 0-2: not complete, d_max = 3
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let rho = 0.5;
        let mut dense = build_metropolis(&g, rho).unwrap().to_dense();
        let d_max = 3.0;
        let old = dense[(0, 1)];
        let new = rho / (d_max * d_max);
        dense[(0, 1)] = new;
        dense[(1, 0)] = new;
        dense[(0, 0)] += old - new;
        dense[(1, 1)] += old - new;
        let a = CombinationMatrix::from_dense(&dense).unwrap();
        let r = check_class(&a, &g).unwrap();
        assert!(!r.in_c2);
        assert!(r.kappa.is_none());
    }

    #[test]
    fn unsupported_matrix_is_rejected() {
        let a = build_metropolis(&Graph::complete(3), 0.5).unwrap();
        assert!(matches!(check_class(&a, &Graph::path(3)), Err(Error::NotSupported { .. })));
    }

    #[test]
    fn from_dense_validation() {
        let zero = DMatrix::zeros(3, 3);
        assert_eq!(CombinationMatrix::from_dense(&zero).unwrap().rho(), 0.0);
        let mut bad = DMatrix::identity(2, 2) * 0.5;
        bad[(0, 1)] = 0.1;
        assert!(CombinationMatrix::from_dense(&bad).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[0.6, -0.1, -0.1, 0.6]);
        assert!(CombinationMatrix::from_dense(&neg).is_err());
        let unstable = DMatrix::identity(2, 2);
        assert!(CombinationMatrix::from_dense(&unstable).is_err());
    }

    #[test]
    fn dense_roundtrip_and_products() {
        let g = gen_er(25, 0.3, &mut rng_from_seed(2)).unwrap();
        let a = build_metropolis(&g, 0.6).unwrap();
        let dense = a.to_dense();
        assert_eq!(CombinationMatrix::from_dense(&dense).unwrap().to_dense(), dense);
        let x = DMatrix::from_fn(25, 3, |i, j| (i as f64 - 3.0 * j as f64).sin());
        assert!((a.mul_dense(&x) - &dense * &x).amax() < 1e-14);
        let radius = a.spectral_radius(200);
        assert!(radius <= 0.6 + 1e-10 && radius > 0.6 - 1e-6, "{radius}");
    }

    #[test]
    fn doubly_stochastic_weights() {
        let g = gen_er(15, 0.3, &mut rng_from_seed(4)).unwrap();
        let c = metropolis_weights(&g);
        for j in 0..15 {
            assert!((c.column(j).sum() - 1.0).abs() < 1e-14);
            assert!((c.row(j).sum() - 1.0).abs() < 1e-14);
        }
        let a = CombinationMatrix::from_dense(&(c.transpose() * 0.9)).unwrap();
        assert!((a.rho() - 0.9).abs() < 1e-14);
    }
}
