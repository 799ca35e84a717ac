use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::detection::{DetectionSpec, Hypothesis};
use crate::error::{Error, Result};

/// Log-likelihood ratio `log N(x; mean_num, var) / N(x; mean_den, var)`.
pub fn gaussian_llr(x: f64, mean_num: f64, mean_den: f64, variance: f64) -> f64 {
    ((x - mean_den) * (x - mean_den) - (x - mean_num) * (x - mean_num)) / (2.0 * variance)
}

/// Gaussian likelihood family for social learning: private data are
/// `N(true_mean, variance)` and the tracked log-ratio compares hypotheses with
/// means `theta_mean` and `theta_prime_mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocialSpec {
    pub theta_mean: f64,
    pub theta_prime_mean: f64,
    pub true_mean: f64,
    pub variance: f64,
}

/// Per-agent innovation process `z_k(i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSpec {
    StandardGaussian,
    /// `mu * log(pi1(x) / pi0(x))` with `x` drawn under `truth`.
    Detection { spec: DetectionSpec, truth: Hypothesis },
    /// `log(L(x|theta) / L(x|theta'))` with `x ~ N(true_mean, variance)`.
    Social(SocialSpec),
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SourceSpec::StandardGaussian => Ok(()),
            SourceSpec::Detection { spec, .. } => spec.validate(),
            SourceSpec::Social(s) => {
                if s.variance > 0.0 && s.variance.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { name: "variance", reason: "must be positive" })
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = StandardNormal.sample(rng);
        match *self {
            SourceSpec::StandardGaussian => g,
            SourceSpec::Detection { spec, truth } => {
                let mean = match truth {
                    Hypothesis::H0 => spec.mean0,
                    Hypothesis::H1 => spec.mean1,
                };
                spec.scaled_llr(mean + libm::sqrt(spec.variance) * g)
            }
            SourceSpec::Social(s) => {
                let x = s.true_mean + libm::sqrt(s.variance) * g;
                gaussian_llr(x, s.theta_mean, s.theta_prime_mean, s.variance)
            }
        }
    }

    /// Variance of one draw.
    pub fn variance(&self) -> f64 {
        match *self {
            SourceSpec::StandardGaussian => 1.0,
            SourceSpec::Detection { spec, .. } => {
                let d = spec.mean1 - spec.mean0;
                spec.mu * spec.mu * d * d / spec.variance
            }
            SourceSpec::Social(s) => {
                let d = s.theta_mean - s.theta_prime_mean;
                d * d / s.variance
            }
        }
    }

    /// Mean of one draw.
    pub fn mean(&self) -> f64 {
        match *self {
            SourceSpec::StandardGaussian => 0.0,
            SourceSpec::Detection { spec, truth } => match truth {
                Hypothesis::H0 => -spec.mu * spec.kl_01(),
                Hypothesis::H1 => spec.mu * spec.kl_10(),
            },
            // the LLR is affine in x, so its mean is the LLR at the mean
            SourceSpec::Social(s) => gaussian_llr(s.true_mean, s.theta_mean, s.theta_prime_mean, s.variance),
        }
    }
}
