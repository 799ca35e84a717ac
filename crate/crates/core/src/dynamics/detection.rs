//! Diffusion detection: each agent combines its neighbors' statistics and
//! takes a step of size `mu` toward its local log-likelihood ratio,
//! `w_i = (1 - mu) C^T w_{i-1} + mu * LLR(x_i)`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::dynamics::source::gaussian_llr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    H0,
    H1,
}

/// Gaussian shift-in-mean detection with step size `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionSpec {
    pub mu: f64,
    pub mean0: f64,
    pub mean1: f64,
    pub variance: f64,
}

impl DetectionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::InvalidParameter { name: "mu", reason: "must lie in (0, 1)" });
        }
        if !(self.variance > 0.0 && self.variance.is_finite()) {
            return Err(Error::InvalidParameter { name: "variance", reason: "must be positive" });
        }
        Ok(())
    }

    /// `mu * log(pi1(x) / pi0(x))`.
    pub fn scaled_llr(&self, x: f64) -> f64 {
        self.mu * gaussian_llr(x, self.mean1, self.mean0, self.variance)
    }

    /// `D(pi0 || pi1)`; equal to `D(pi1 || pi0)` for equal variances.
    pub fn kl_01(&self) -> f64 {
        let d = self.mean1 - self.mean0;
        d * d / (2.0 * self.variance)
    }

    pub fn kl_10(&self) -> f64 {
        self.kl_01()
    }
}

/// Free-function form of [`DetectionSpec::scaled_llr`].
pub fn detection_llr(x: f64, spec: &DetectionSpec) -> f64 {
    spec.scaled_llr(x)
}

/// A detection network with a validated doubly-stochastic `C`.
#[derive(Debug, Clone)]
pub struct DetectionNetwork {
    c: DMatrix<f64>,
    spec: DetectionSpec,
}

impl DetectionNetwork {
    pub fn new(c: DMatrix<f64>, spec: DetectionSpec) -> Result<Self> {
        spec.validate()?;
        let n = c.nrows();
        if c.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.ncols() });
        }
        if c.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidMatrix("weights must be nonnegative"));
        }
        let stochastic = (0..n).all(|j| (c.column(j).sum() - 1.0).abs() <= 1e-12 && (c.row(j).sum() - 1.0).abs() <= 1e-12);
        if !stochastic {
            return Err(Error::InvalidMatrix("combination weights must be doubly stochastic"));
        }
        Ok(DetectionNetwork { c, spec })
    }

    pub fn spec(&self) -> &DetectionSpec {
        &self.spec
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Equivalent VAR matrix `(1 - mu) C^T`.
    pub fn var_matrix(&self) -> DMatrix<f64> {
        self.c.transpose() * (1.0 - self.spec.mu)
    }

    pub fn step(&self, w_prev: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let n = self.c.nrows();
        for len in [w_prev.len(), x.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        let keep = 1.0 - self.spec.mu;
        Ok((0..n)
            .map(|k| {
                let combined: f64 = (0..n).map(|l| self.c[(l, k)] * w_prev[l]).sum();
                keep * combined + self.spec.scaled_llr(x[k])
            })
            .collect())
    }
}

/// One combine-then-adapt detection step.
pub fn detection_step(w_prev: &[f64], c: &DMatrix<f64>, spec: &DetectionSpec, x: &[f64]) -> Result<Vec<f64>> {
    DetectionNetwork::new(c.clone(), *spec)?.step(w_prev, x)
}
