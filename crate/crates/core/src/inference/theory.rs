use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;

/// Asymptotic location of the scaled disconnected entries (`eta`) and their
/// separation from the connected ones (`gamma`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPrediction {
    pub kind: EstimatorKind,
    pub eta: f64,
    pub gamma: f64,
    pub rho: f64,
    pub kappa: f64,
    pub xi: f64,
    pub p: f64,
    /// `rho - kappa`
    pub zeta: f64,
}

impl TheoryPrediction {
    /// Expected location of the scaled connected entries.
    pub fn connected_level(&self) -> f64 {
        self.eta + self.gamma
    }
}

/// Limiting bias and gap for an estimator given the spectral scale `rho`, a
/// lower-weight witness `kappa`, the observed fraction `xi` and the limiting
/// connection probability `p`.
pub fn theory_bias_gap(kind: EstimatorKind, rho: f64, kappa: f64, xi: f64, p: f64) -> Result<TheoryPrediction> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter { name: "rho", reason: "must lie in (0, 1)" });
    }
    if !(kappa > 0.0 && kappa <= rho) {
        return Err(Error::InvalidParameter { name: "kappa", reason: "must lie in (0, rho]" });
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidParameter { name: "xi", reason: "must lie in [0, 1]" });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter { name: "p", reason: "must lie in [0, 1]" });
    }
    let zeta = rho - kappa;
    let k2p = kappa * kappa * p;
    let (eta, gamma) = match kind {
        EstimatorKind::Granger => {
            let denom = 1.0 - (rho * rho - 2.0 * rho * kappa * xi + kappa * kappa * xi);
            (k2p * (2.0 * rho - kappa) * (1.0 - xi) / denom, kappa)
        }
        EstimatorKind::OneLag => {
            let z2 = zeta * zeta;
            let squeeze = (1.0 - z2) * (1.0 - z2);
            (k2p * (rho + rho * z2 + 2.0 * zeta) / ((1.0 - rho * rho) * squeeze), kappa * (1.0 + z2) / squeeze)
        }
        EstimatorKind::Residual => {
            let lift = (1.0 + zeta) * (1.0 + zeta);
            (-k2p / ((1.0 + rho) * lift), kappa / lift)
        }
    };
    Ok(TheoryPrediction { kind, eta, gamma, rho, kappa, xi, p, zeta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn granger_full_observation_is_unbiased() {
        let t = theory_bias_gap(EstimatorKind::Granger, 0.7, 0.4, 1.0, 0.3).unwrap();
        assert_eq!(t.eta, 0.0);
        assert_eq!(t.gamma, 0.4);
    }

    #[test]
    fn half_rho_values() {
        let g = theory_bias_gap(EstimatorKind::Granger, 0.5, 0.5, 0.0, 0.3).unwrap();
        assert!((g.eta - 0.05).abs() < 1e-15);
        assert_eq!(g.gamma, 0.5);
        let r = theory_bias_gap(EstimatorKind::Residual, 0.5, 0.5, 0.0, 0.3).unwrap();
        assert!((r.eta + 0.05).abs() < 1e-15);
        assert_eq!(r.gamma, 0.5);
        let o = theory_bias_gap(EstimatorKind::OneLag, 0.5, 0.5, 0.0, 0.3).unwrap();
        assert!((o.eta - 0.05).abs() < 1e-15);
        assert_eq!(o.gamma, 0.5);
    }

    #[test]
    fn sparse_limit_has_no_bias() {
        for kind in EstimatorKind::ALL {
            let t = theory_bias_gap(kind, 0.6, 0.3, 0.2, 0.0).unwrap();
            assert_eq!(t.eta, 0.0);
            assert!(t.gamma > 0.0);
        }
    }

    #[test]
    fn ranges_are_enforced() {
        let bad = [(1.0, 0.5, 0.0, 0.3), (0.5, 0.6, 0.0, 0.3), (0.5, 0.0, 0.0, 0.3), (0.5, 0.5, 1.5, 0.3), (0.5, 0.5, 0.0, -0.1)];
        for (rho, kappa, xi, p) in bad {
            assert!(theory_bias_gap(EstimatorKind::Granger, rho, kappa, xi, p).is_err());
        }
    }
}
