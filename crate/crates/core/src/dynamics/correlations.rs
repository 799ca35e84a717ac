use nalgebra::DMatrix;

use crate::combmat::CombinationMatrix;
use crate::error::{Error, Result};
use crate::graph::ObservationSet;
use crate::linalg::{select, solve_shifted_square, spd_inverse};

/// Stability margin `1 - lambda_max^2` below which `I - A^2` counts as singular.
pub const SINGULARITY_MARGIN: f64 = 1e-10;

/// Residual target for the block conjugate-gradient solve.
const CG_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Analytic,
    Empirical { samples: usize },
}

impl Origin {
    pub fn name(&self) -> &'static str {
        match self {
            Origin::Analytic => "analytic",
            Origin::Empirical { .. } => "empirical",
        }
    }
}

/// Lag-0 and lag-1 correlations over `nodes` (global indices of the rows).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPair {
    pub r0: DMatrix<f64>,
    pub r1: DMatrix<f64>,
    pub origin: Origin,
    pub nodes: ObservationSet,
}

impl CorrelationPair {
    /// Submatrices for `s`, which must be a subset of `self.nodes`.
    pub fn restrict(&self, s: &ObservationSet) -> Result<CorrelationPair> {
        let pos = s
            .indices()
            .iter()
            .map(|&i| {
                self.nodes
                    .position(i)
                    .ok_or(Error::NodeOutOfRange { index: i, n: self.nodes.len() })
            })
            .collect::<Result<alloc::vec::Vec<_>>>()?;
        Ok(CorrelationPair {
            r0: select(&self.r0, &pos, &pos),
            r1: select(&self.r1, &pos, &pos),
            origin: self.origin,
            nodes: s.clone(),
        })
    }
}

fn check_stable(a: &CombinationMatrix) -> Result<()> {
    let lambda = a.spectral_radius(100).max(0.0);
    let margin = 1.0 - lambda * lambda;
    if margin < SINGULARITY_MARGIN {
        Err(Error::NearSingular { margin })
    } else {
        Ok(())
    }
}

/// Closed forms for unit-variance white input:
/// `R0 = (I - A^2)^{-1}`, `R1 = A R0`, over all nodes.
pub fn analytic_correlations(a: &CombinationMatrix) -> Result<CorrelationPair> {
    check_stable(a)?;
    let n = a.n();
    let dense = a.to_dense();
    let m = DMatrix::identity(n, n) - &dense * &dense;
    let r0 = spd_inverse(&m).map_err(|_| Error::NearSingular { margin: 0.0 })?;
    let r1 = &dense * &r0;
    Ok(CorrelationPair { r0, r1, origin: Origin::Analytic, nodes: ObservationSet::full(n) })
}

/// `[R0]_S` and `[R1]_S` without forming the full inverse: the columns of
/// `(I - A^2)^{-1}` indexed by `S` come from conjugate gradients.
pub fn analytic_correlations_on(a: &CombinationMatrix, s: &ObservationSet) -> Result<CorrelationPair> {
    check_stable(a)?;
    if let Some(&index) = s.indices().last().filter(|&&i| i >= a.n()) {
        return Err(Error::NodeOutOfRange { index, n: a.n() });
    }
    let cols = solve_shifted_square(a, s.indices(), CG_TOL)?;
    let r1_cols = a.mul_dense(&cols);
    let rows = s.indices();
    let r0 = DMatrix::from_fn(rows.len(), rows.len(), |i, j| 0.5 * (cols[(rows[i], j)] + cols[(rows[j], i)]));
    let r1 = DMatrix::from_fn(rows.len(), rows.len(), |i, j| r1_cols[(rows[i], j)]);
    Ok(CorrelationPair { r0, r1, origin: Origin::Analytic, nodes: s.clone() })
}

/// Anything that can supply correlation submatrices for a probed set.
pub trait CorrelationProvider {
    fn correlations(&self, s: &ObservationSet) -> Result<CorrelationPair>;
}

/// Analytic correlations of a combination matrix, computed per probe.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticProvider<'a> {
    pub matrix: &'a CombinationMatrix,
}

impl CorrelationProvider for AnalyticProvider<'_> {
    fn correlations(&self, s: &ObservationSet) -> Result<CorrelationPair> {
        analytic_correlations_on(self.matrix, s)
    }
}

impl CorrelationProvider for CorrelationPair {
    fn correlations(&self, s: &ObservationSet) -> Result<CorrelationPair> {
        self.restrict(s)
    }
}
