//! From estimated submatrices to adjacency decisions, and the scores used to
//! judge them.

mod adjacency;
mod cluster;
mod patches;
mod scoring;
mod theory;

pub use adjacency::Adjacency;
pub use cluster::{cluster_classify, two_means_1d, ClusterSummary, TwoMeans, DEGENERATE_SEPARATION};
pub use patches::{
    aggregate_probes, evaluate_probe, pairwise_probes, patch_reconstruct, reconstruct_from_probes, PatchConfig,
    PatchOutcome, ProbeReport,
};
pub use scoring::{
    classify, classify_threshold, error_rates, margins, threshold_sweep, Classification, Classifier, ErrorRates,
    MarginReport,
};
pub use theory::{theory_bias_gap, TheoryPrediction};
