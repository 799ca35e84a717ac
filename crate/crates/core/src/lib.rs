//! Graph tomography for linear diffusion networks.
//!
//! A network evolves as `w_i = A w_{i-1} + z_i` with `A` a symmetric,
//! nonnegative combination matrix supported on an undirected graph. Only a
//! subset `S` of the nodes is observed; the crate estimates the graph among
//! them from the lag-0 and lag-1 correlations of the observed streams.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command-line
//! front end live in the `graphtomo` crate.

#![no_std]
// Negated comparisons are how parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combmat;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod inference;
pub mod linalg;
pub mod rng;

pub use combmat::{build_laplacian, build_metropolis, check_class, ClassReport, CombinationMatrix};
pub use dynamics::{AnalyticProvider, CorrelationPair, CorrelationProvider, Origin};
pub use error::{Error, Result};
pub use estimators::{estimate, EstimatedSubmatrix, EstimatorKind};
pub use graph::{gen_er, gen_partial_er, DegreeStats, Graph, ObservationSet, Regime};
pub use inference::{Adjacency, Classifier, ErrorRates, MarginReport, TheoryPrediction};
pub use rng::{derive_seed, rng_from_seed, TrialRng};
