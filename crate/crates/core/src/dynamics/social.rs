//! Non-Bayesian social learning with log-linear belief combination.
//!
//! Each agent first folds its private likelihood into its belief (Bayes
//! update, giving the intermediate belief `psi`), then replaces its belief by
//! the normalized geometric average of its neighbors' intermediate beliefs
//! weighted by `c_lk`. Beliefs are held as log-probabilities.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Per-agent log-beliefs over a finite hypothesis set.
#[derive(Debug, Clone, PartialEq)]
pub struct Beliefs {
    log: Vec<Vec<f64>>,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + libm::log(xs.iter().map(|x| libm::exp(x - max)).sum::<f64>())
}

fn normalize_row(row: &mut [f64], agent: usize) -> Result<()> {
    let lse = log_sum_exp(row);
    if !lse.is_finite() {
        return Err(Error::ZeroProbability { agent });
    }
    row.iter_mut().for_each(|x| *x -= lse);
    Ok(())
}

impl Beliefs {
    /// Uniform beliefs for `agents` agents over `hypotheses` hypotheses.
    pub fn uniform(agents: usize, hypotheses: usize) -> Self {
        let v = -libm::log(hypotheses as f64);
        Beliefs { log: alloc::vec![alloc::vec![v; hypotheses]; agents] }
    }

    /// From strictly positive probability vectors summing to one.
    pub fn from_probabilities(rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let mut log = Vec::with_capacity(rows.len());
        for (agent, row) in rows.iter().enumerate() {
            if row.len() != width || width == 0 {
                return Err(Error::DimensionMismatch { expected: width, found: row.len() });
            }
            if row.iter().any(|&p| !(p > 0.0)) {
                return Err(Error::ZeroProbability { agent });
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter { name: "beliefs", reason: "each belief vector must sum to 1" });
            }
            let mut l: Vec<f64> = row.iter().map(|&p| libm::log(p)).collect();
            normalize_row(&mut l, agent)?;
            log.push(l);
        }
        Ok(Beliefs { log })
    }

    pub fn agents(&self) -> usize {
        self.log.len()
    }

    pub fn hypotheses(&self) -> usize {
        self.log.first().map_or(0, Vec::len)
    }

    pub fn log_beliefs(&self) -> &[Vec<f64>] {
        &self.log
    }

    pub fn probabilities(&self) -> Vec<Vec<f64>> {
        self.log.iter().map(|row| row.iter().map(|&x| libm::exp(x)).collect()).collect()
    }

    /// Per-agent `log(b(theta) / b(theta'))`.
    pub fn log_ratio(&self, theta: usize, theta_prime: usize) -> Vec<f64> {
        self.log.iter().map(|row| row[theta] - row[theta_prime]).collect()
    }
}

/// Output of one social-learning round.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialStep {
    /// Beliefs after the private Bayesian update (`psi`).
    pub intermediate: Beliefs,
    /// Beliefs after combination.
    pub beliefs: Beliefs,
}

/// One round: `psi_k ∝ b_k L_k`, then
/// `b_k ∝ exp((1 - damping) * sum_l c_lk log psi_l)`.
///
/// With `damping = 0` the log-ratios of `psi` obey `w_i = C^T w_{i-1} + z_i`,
/// with `z` the log-likelihood ratios; a positive damping scales `C^T` by
/// `1 - damping`.
pub fn social_learning_step(
    beliefs: &Beliefs,
    likelihoods: &[Vec<f64>],
    c: &DMatrix<f64>,
    damping: f64,
) -> Result<SocialStep> {
    let n = beliefs.agents();
    let m = beliefs.hypotheses();
    if likelihoods.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: likelihoods.len() });
    }
    if c.nrows() != n || c.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.nrows() });
    }
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::InvalidParameter { name: "damping", reason: "must lie in [0, 1)" });
    }
    if c.iter().any(|&v| !(v >= 0.0)) || (0..n).any(|k| (c.column(k).sum() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidMatrix("combination weights must be left-stochastic"));
    }

    let mut psi = Vec::with_capacity(n);
    for (agent, (row, lik)) in beliefs.log.iter().zip(likelihoods).enumerate() {
        if lik.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: lik.len() });
        }
        if lik.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::ZeroProbability { agent });
        }
        let mut updated: Vec<f64> = row.iter().zip(lik).map(|(b, &l)| b + libm::log(l)).collect();
        normalize_row(&mut updated, agent)?;
        psi.push(updated);
    }

    let keep = 1.0 - damping;
    let mut combined = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = alloc::vec![0.0; m];
        for (l, psi_l) in psi.iter().enumerate() {
            let w = c[(l, k)];
            if w != 0.0 {
                for (dst, &v) in row.iter_mut().zip(psi_l) {
                    *dst += w * v;
                }
            }
        }
        row.iter_mut().for_each(|x| *x *= keep);
        normalize_row(&mut row, k)?;
        combined.push(row);
    }
    Ok(SocialStep { intermediate: Beliefs { log: psi }, beliefs: Beliefs { log: combined } })
}
