//! Experiment configuration (JSON). See the README for a full example.

use graphtomo_core::dynamics::{DetectionSpec, Hypothesis, SocialSpec, SourceSpec};
use graphtomo_core::inference::Classifier;
use graphtomo_core::{build_laplacian, build_metropolis, CombinationMatrix, EstimatorKind, Graph, Regime};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegimeSpec {
    Dense { p: f64 },
    LogSparse { c: f64 },
    IntermediateSparse { exponent: f64 },
}

impl RegimeSpec {
    pub fn regime(&self) -> Regime {
        match *self {
            RegimeSpec::Dense { p } => Regime::Dense { p },
            RegimeSpec::LogSparse { c } => Regime::LogSparse { c },
            RegimeSpec::IntermediateSparse { exponent } => Regime::IntermediateSparse { exponent },
        }
    }
}

/// How the probed set is chosen. Node labels in `edges` are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbedSpec {
    /// The first `round(fraction * n)` nodes of an ER graph.
    Fraction { fraction: f64 },
    /// The first `size` nodes of an ER graph.
    Size { size: usize },
    /// A fixed subgraph on the first `size` nodes; everything else is random.
    Subgraph { size: usize, edges: Vec<[usize; 2]> },
}

impl ProbedSpec {
    pub fn size(&self, n: usize) -> usize {
        match *self {
            ProbedSpec::Fraction { fraction } => ((fraction * n as f64).round() as usize).clamp(2, n),
            ProbedSpec::Size { size } | ProbedSpec::Subgraph { size, .. } => size,
        }
    }

    pub fn fixed_subgraph(&self) -> Option<Graph> {
        match self {
            ProbedSpec::Subgraph { size, edges } => {
                let zero_based: Vec<(usize, usize)> = edges.iter().map(|[l, k]| (l - 1, k - 1)).collect();
                Graph::from_edges(*size, &zero_based).ok()
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixRule {
    Metropolis { rho: f64 },
    Laplacian { rho: f64, lambda: f64 },
}

impl MatrixRule {
    pub fn build(&self, g: &Graph) -> graphtomo_core::Result<CombinationMatrix> {
        match *self {
            MatrixRule::Metropolis { rho } => build_metropolis(g, rho),
            MatrixRule::Laplacian { rho, lambda } => build_laplacian(g, rho, lambda),
        }
    }

    pub fn rho(&self) -> f64 {
        match *self {
            MatrixRule::Metropolis { rho } | MatrixRule::Laplacian { rho, .. } => rho,
        }
    }

    /// The natural lower-weight witness: `rho` for Metropolis, `rho * lambda`
    /// for Laplacian.
    pub fn kappa(&self) -> f64 {
        match *self {
            MatrixRule::Metropolis { rho } => rho,
            MatrixRule::Laplacian { rho, lambda } => rho * lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnovationSpec {
    Gaussian,
    Detection { mu: f64, mean0: f64, mean1: f64, variance: f64, truth: HypothesisSpec },
    Social { theta_mean: f64, theta_prime_mean: f64, true_mean: f64, variance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisSpec {
    H0,
    H1,
}

impl InnovationSpec {
    pub fn source(&self) -> SourceSpec {
        match *self {
            InnovationSpec::Gaussian => SourceSpec::StandardGaussian,
            InnovationSpec::Detection { mu, mean0, mean1, variance, truth } => SourceSpec::Detection {
                spec: DetectionSpec { mu, mean0, mean1, variance },
                truth: match truth {
                    HypothesisSpec::H0 => Hypothesis::H0,
                    HypothesisSpec::H1 => Hypothesis::H1,
                },
            },
            InnovationSpec::Social { theta_mean, theta_prime_mean, true_mean, variance } => {
                SourceSpec::Social(SocialSpec { theta_mean, theta_prime_mean, true_mean, variance })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrelationSpec {
    Analytic,
    Empirical {
        steps: usize,
        #[serde(default)]
        burn_in: Option<usize>,
        #[serde(default = "default_innovation")]
        innovation: InnovationSpec,
    },
}

fn default_innovation() -> InnovationSpec {
    InnovationSpec::Gaussian
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassifierSpec {
    Threshold { tau: f64 },
    Cluster,
}

impl ClassifierSpec {
    pub fn classifier(&self) -> Classifier {
        match *self {
            ClassifierSpec::Threshold { tau } => Classifier::Threshold { tau },
            ClassifierSpec::Cluster => Classifier::Cluster,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub regime: RegimeSpec,
    pub n_list: Vec<usize>,
    pub probed: ProbedSpec,
    pub matrix: MatrixRule,
    #[serde(with = "kind_names")]
    pub estimators: Vec<EstimatorKind>,
    pub correlations: CorrelationSpec,
    pub classifier: ClassifierSpec,
    pub trials: u64,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => return Err(ConfigError::Version { found: v.try_into().unwrap_or(u32::MAX) }),
            None => return Err(ConfigError::Invalid("missing integer `schema_version`".into())),
        }
        let config: ExperimentConfig = serde_json::from_value(value)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if self.trials == 0 {
            return invalid("`trials` must be at least 1".into());
        }
        if self.n_list.is_empty() {
            return invalid("`n_list` must not be empty".into());
        }
        if self.estimators.is_empty() {
            return invalid("`estimators` must not be empty".into());
        }
        self.regime.regime().validate().map_err(|e| ConfigError::Invalid(format!("regime: {e}")))?;
        for &n in &self.n_list {
            if n < 2 {
                return invalid(format!("n = {n} is too small"));
            }
            let size = self.probed.size(n);
            if size < 2 || size > n {
                return invalid(format!("probed set of {size} nodes does not fit n = {n}"));
            }
        }
        match &self.probed {
            ProbedSpec::Fraction { fraction } if !(*fraction > 0.0 && *fraction <= 1.0) => {
                return invalid("probed fraction must lie in (0, 1]".into());
            }
            ProbedSpec::Subgraph { size, edges } => {
                if edges.iter().flatten().any(|&l| l == 0 || l > *size) {
                    return invalid("subgraph edge labels must lie in 1..=size".into());
                }
                if edges.iter().any(|[l, k]| l == k) {
                    return invalid("subgraph edges must join distinct nodes".into());
                }
            }
            _ => {}
        }
        let rho = self.matrix.rho();
        if !(rho > 0.0 && rho < 1.0) {
            return invalid("matrix rho must lie in (0, 1)".into());
        }
        if let MatrixRule::Laplacian { lambda, .. } = self.matrix {
            if !(lambda > 0.0 && lambda <= 1.0) {
                return invalid("laplacian lambda must lie in (0, 1]".into());
            }
        }
        if let CorrelationSpec::Empirical { steps, burn_in, innovation } = self.correlations {
            if burn_in.is_some_and(|b| b >= steps) {
                return invalid("empirical `steps` must exceed `burn_in`".into());
            }
            innovation.source().validate().map_err(|e| ConfigError::Invalid(format!("innovation: {e}")))?;
        }
        if let ClassifierSpec::Threshold { tau } = self.classifier {
            if !tau.is_finite() {
                return invalid("threshold tau must be finite".into());
            }
        }
        Ok(())
    }
}

/// Estimator kinds as their names (`"granger"`, `"one-lag"`, `"residual"`).
mod kind_names {
    use graphtomo_core::EstimatorKind;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(kinds: &[EstimatorKind], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(kinds.iter().map(|k| k.name()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<EstimatorKind>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|name| name.parse().map_err(|_| D::Error::custom(format!("unknown estimator `{name}`"))))
            .collect()
    }
}
