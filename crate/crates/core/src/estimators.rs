//! Estimators of the probed submatrix `A_S` from correlation submatrices, and
//! the closed-form and series expressions of their errors `E = Â_S - A_S`.

use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;

use crate::combmat::CombinationMatrix;
use crate::dynamics::{CorrelationPair, Origin};
use crate::error::{Error, Result};
use crate::graph::ObservationSet;
use crate::linalg::{condition_number, select, solve_right, MAX_CONDITION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    /// `[R1]_S ([R0]_S)^{-1}`
    Granger,
    /// `[R1]_S`
    OneLag,
    /// `[R1]_S - [R0]_S + I`
    Residual,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Granger, EstimatorKind::OneLag, EstimatorKind::Residual];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Granger => "granger",
            EstimatorKind::OneLag => "one-lag",
            EstimatorKind::Residual => "residual",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "granger" => Ok(EstimatorKind::Granger),
            "one-lag" | "one_lag" | "onelag" => Ok(EstimatorKind::OneLag),
            "residual" => Ok(EstimatorKind::Residual),
            _ => Err(Error::InvalidParameter { name: "estimator", reason: "expected granger, one-lag or residual" }),
        }
    }
}

/// An estimate of `A_S` with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedSubmatrix {
    pub values: DMatrix<f64>,
    pub kind: EstimatorKind,
    pub source: Origin,
    pub nodes: ObservationSet,
    /// Condition number of `[R0]_S` (Granger only).
    pub condition: Option<f64>,
}

fn check_square_pair(r0_s: &DMatrix<f64>, r1_s: &DMatrix<f64>) -> Result<()> {
    let n = r0_s.nrows();
    for dim in [r0_s.ncols(), r1_s.nrows(), r1_s.ncols()] {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, found: dim });
        }
    }
    Ok(())
}

/// Granger estimate `r1_s r0_s^{-1}` and the condition number of `r0_s`.
pub fn granger(r0_s: &DMatrix<f64>, r1_s: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    check_square_pair(r0_s, r1_s)?;
    let condition = condition_number(r0_s);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    Ok((solve_right(r1_s, r0_s)?, condition))
}

pub fn one_lag(r1_s: &DMatrix<f64>) -> DMatrix<f64> {
    r1_s.clone()
}

pub fn residual(r0_s: &DMatrix<f64>, r1_s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square_pair(r0_s, r1_s)?;
    Ok(r1_s - r0_s + DMatrix::identity(r0_s.nrows(), r0_s.nrows()))
}

/// Applies `kind` to a correlation pair; analytic and empirical pairs share
/// this path.
pub fn estimate(kind: EstimatorKind, pair: &CorrelationPair) -> Result<EstimatedSubmatrix> {
    let (values, condition) = match kind {
        EstimatorKind::Granger => {
            let (v, c) = granger(&pair.r0, &pair.r1)?;
            (v, Some(c))
        }
        EstimatorKind::OneLag => (one_lag(&pair.r1), None),
        EstimatorKind::Residual => (residual(&pair.r0, &pair.r1)?, None),
    };
    Ok(EstimatedSubmatrix { values, kind, source: pair.origin, nodes: pair.nodes.clone(), condition })
}

/// Closed-form Granger error
/// `A_{S S'} (I - [A^2]_{S'})^{-1} [A^2]_{S' S}`.
pub fn error_oracle_granger(a: &CombinationMatrix, s: &ObservationSet) -> Result<DMatrix<f64>> {
    let n = a.n();
    if let Some(&index) = s.indices().last().filter(|&&i| i >= n) {
        return Err(Error::NodeOutOfRange { index, n });
    }
    let latent = s.complement(n);
    let k = s.len();
    if latent.is_empty() {
        return Ok(DMatrix::zeros(k, k));
    }
    let all: alloc::vec::Vec<usize> = (0..n).collect();
    // [A^2]_{:, S'} and [A^2]_{:, S} through sparse-times-dense products
    let a_sq_latent = a.mul_dense(&a.block(&all, &latent));
    let a_sq_probed = a.mul_dense(&a.block(&all, s.indices()));
    let m = DMatrix::identity(latent.len(), latent.len()) - select(&a_sq_latent, &latent, &all[..latent.len()]);
    let rhs = select(&a_sq_probed, &latent, &all[..k]);
    let chol = m.cholesky().ok_or(Error::Singular)?;
    let y = chol.solve(&rhs);
    Ok(a.block(s.indices(), &latent) * y)
}

/// Result of summing an error series up to a guaranteed tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesError {
    pub matrix: DMatrix<f64>,
    /// Number of series terms `h` included.
    pub terms: usize,
    /// Entrywise bound on the neglected tail.
    pub tail_bound: f64,
}

/// Series error of the one-lag (`sum_h [A^{2h+1}]_S`) or residual
/// (`sum_h [A^{2h+1}]_S - [A^{2h}]_S`) estimator, `h >= 1`.
///
/// Entries of `A^k` are bounded by `rho^k`, so after `H` terms the tail is at
/// most `rho^{2H+3} / (1 - rho^2)` (one-lag) or `rho^{2H+2} / (1 - rho)`
/// (residual); summation stops once that bound drops below `tol`.
pub fn error_oracle_series(
    a: &CombinationMatrix,
    s: &ObservationSet,
    kind: EstimatorKind,
    tol: f64,
) -> Result<SeriesError> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: "must be positive" });
    }
    if kind == EstimatorKind::Granger {
        return Err(Error::InvalidParameter { name: "kind", reason: "the Granger error has a closed form" });
    }
    let n = a.n();
    if let Some(&index) = s.indices().last().filter(|&&i| i >= n) {
        return Err(Error::NodeOutOfRange { index, n });
    }
    let rho = a.rho();
    let tail = |h: usize| match kind {
        EstimatorKind::OneLag => libm::pow(rho, (2 * h + 3) as f64) / (1.0 - rho * rho),
        _ => libm::pow(rho, (2 * h + 2) as f64) / (1.0 - rho),
    };
    let k = s.len();
    let all: alloc::vec::Vec<usize> = (0..n).collect();
    let pick = |x: &DMatrix<f64>| select(x, s.indices(), &all[..k]);

    let mut matrix = DMatrix::zeros(k, k);
    let mut terms = 0;
    // power holds A^p restricted to columns S
    let mut power = a.block(&all, s.indices());
    let mut p = 1;
    while tail(terms) >= tol {
        terms += 1;
        // advance to A^{2h}, then A^{2h+1}
        power = a.mul_dense(&power);
        p += 1;
        debug_assert_eq!(p, 2 * terms);
        if kind == EstimatorKind::Residual {
            matrix -= pick(&power);
        }
        power = a.mul_dense(&power);
        p += 1;
        matrix += pick(&power);
    }
    Ok(SeriesError { matrix, terms, tail_bound: tail(terms) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::analytic_correlations;

    fn scalar(a: f64) -> CombinationMatrix {
        CombinationMatrix::from_dense(&DMatrix::from_element(1, 1, a)).unwrap()
    }

    #[test]
    fn scalar_estimators() {
        let pair = analytic_correlations(&scalar(0.5)).unwrap();
        let g = estimate(EstimatorKind::Granger, &pair).unwrap();
        assert!((g.values[(0, 0)] - 0.5).abs() < 1e-15);
        let o = estimate(EstimatorKind::OneLag, &pair).unwrap();
        assert!((o.values[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
        let r = estimate(EstimatorKind::Residual, &pair).unwrap();
        assert!((r.values[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_series() {
        let s = ObservationSet::first(1);
        let one = error_oracle_series(&scalar(0.5), &s, EstimatorKind::OneLag, 1e-12).unwrap();
        assert!((one.matrix[(0, 0)] - 1.0 / 6.0).abs() < 1e-12);
        let res = error_oracle_series(&scalar(0.5), &s, EstimatorKind::Residual, 1e-12).unwrap();
        assert!((res.matrix[(0, 0)] + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_everything_vanishes() {
        let zero = CombinationMatrix::from_dense(&DMatrix::zeros(3, 3)).unwrap();
        let pair = analytic_correlations(&zero).unwrap();
        for kind in EstimatorKind::ALL {
            assert_eq!(estimate(kind, &pair).unwrap().values, DMatrix::zeros(3, 3));
        }
        let s = ObservationSet::first(2);
        let series = error_oracle_series(&zero, &s, EstimatorKind::OneLag, 1e-10).unwrap();
        assert_eq!(series.terms, 0);
        assert_eq!(series.matrix, DMatrix::zeros(2, 2));
        assert_eq!(error_oracle_granger(&zero, &s).unwrap(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn full_set_has_no_granger_error() {
        let a = CombinationMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[0.3, 0.2, 0.2, 0.3])).unwrap();
        assert_eq!(error_oracle_granger(&a, &ObservationSet::full(2)).unwrap(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn bad_inputs() {
        let s = ObservationSet::first(1);
        assert!(error_oracle_series(&scalar(0.5), &s, EstimatorKind::OneLag, 0.0).is_err());
        assert!(error_oracle_series(&scalar(0.5), &s, EstimatorKind::Granger, 1e-3).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(granger(&singular, &singular), Err(Error::IllConditioned { .. })));
        assert!(granger(&DMatrix::identity(2, 2), &DMatrix::identity(3, 3)).is_err());
        assert_eq!("one-lag".parse::<EstimatorKind>().unwrap(), EstimatorKind::OneLag);
        assert!("ols".parse::<EstimatorKind>().is_err());
    }
}
