//! VAR diffusion `w_i = A w_{i-1} + z_i`: steady-state correlations, simulation,
//! and the detection and social-learning processes that reduce to it.

mod correlations;
mod detection;
mod simulate;
mod social;
mod source;

pub use correlations::{
    analytic_correlations, analytic_correlations_on, AnalyticProvider, CorrelationPair, CorrelationProvider,
    Origin,
};
pub use detection::{detection_llr, detection_step, DetectionNetwork, DetectionSpec, Hypothesis};
pub use simulate::{default_burn_in, empirical_correlations, simulate, simulate_with, var_step, SimulationOptions, TrajectoryStats};
pub use social::{social_learning_step, Beliefs, SocialStep};
pub use source::{gaussian_llr, SocialSpec, SourceSpec};
