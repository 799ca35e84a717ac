use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use crate::combmat::CombinationMatrix;
use crate::dynamics::correlations::{CorrelationPair, Origin};
use crate::dynamics::source::SourceSpec;
use crate::error::{Error, Result};
use crate::graph::ObservationSet;

/// Burn-in of `ceil(10 / (1 - rho))` steps.
pub fn default_burn_in(rho: f64) -> usize {
    libm::ceil(10.0 / (1.0 - rho)) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    /// Total number of steps, burn-in included.
    pub steps: usize,
    /// Discarded prefix; `None` uses [`default_burn_in`].
    pub burn_in: Option<usize>,
    /// Agents whose outputs are accumulated; `None` observes everyone.
    pub observed: Option<ObservationSet>,
    /// Divergence guard on `max_k |w_k(i)|`.
    pub divergence_bound: f64,
}

impl SimulationOptions {
    pub fn new(steps: usize) -> Self {
        SimulationOptions { steps, burn_in: None, observed: None, divergence_bound: 1e12 }
    }

    pub fn burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = Some(burn_in);
        self
    }

    pub fn observe(mut self, s: ObservationSet) -> Self {
        self.observed = Some(s);
        self
    }
}

/// Streaming sums for the lag-0 and lag-1 sample correlations.
///
/// Every retained sample `w_i` is paired with its predecessor `w_{i-1}`, so
/// both accumulators see the same number of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub observed: ObservationSet,
    pub t_total: usize,
    pub burn_in: usize,
    pub retained: usize,
    pub source_variance: f64,
    pub sum_w: Vec<f64>,
    pub sum_prev: Vec<f64>,
    /// Upper triangle (row-major, full storage) of `sum w_i w_i^T`.
    pub sum_outer_0: Vec<f64>,
    /// `sum w_i w_{i-1}^T`, full storage.
    pub sum_outer_1: Vec<f64>,
}

impl TrajectoryStats {
    pub fn new(observed: ObservationSet, burn_in: usize, source_variance: f64) -> Self {
        let m = observed.len();
        TrajectoryStats {
            observed,
            t_total: burn_in,
            burn_in,
            retained: 0,
            source_variance,
            sum_w: alloc::vec![0.0; m],
            sum_prev: alloc::vec![0.0; m],
            sum_outer_0: alloc::vec![0.0; m * m],
            sum_outer_1: alloc::vec![0.0; m * m],
        }
    }

    pub fn dim(&self) -> usize {
        self.sum_w.len()
    }

    /// Adds one retained sample with its predecessor (both over observed agents).
    pub fn record(&mut self, prev: &[f64], current: &[f64]) {
        let m = self.dim();
        debug_assert_eq!(prev.len(), m);
        debug_assert_eq!(current.len(), m);
        for a in 0..m {
            let wa = current[a];
            self.sum_w[a] += wa;
            self.sum_prev[a] += prev[a];
            let row0 = &mut self.sum_outer_0[a * m..(a + 1) * m];
            for b in a..m {
                row0[b] += wa * current[b];
            }
            let row1 = &mut self.sum_outer_1[a * m..(a + 1) * m];
            for (dst, &pb) in row1.iter_mut().zip(prev) {
                *dst += wa * pb;
            }
        }
        self.retained += 1;
        self.t_total += 1;
    }

    /// Time average of each observed agent over the retained samples.
    pub fn mean(&self) -> Vec<f64> {
        let t = self.retained.max(1) as f64;
        self.sum_w.iter().map(|s| s / t).collect()
    }
}

/// One VAR step `A w_prev + z`.
pub fn var_step(a: &CombinationMatrix, w_prev: &[f64], z: &[f64]) -> Vec<f64> {
    let mut out = a.matvec(w_prev);
    for (o, zi) in out.iter_mut().zip(z) {
        *o += zi;
    }
    out
}

/// Runs `w_i = A w_{i-1} + z_i` from `w_0 = 0` and accumulates statistics
/// after burn-in.
pub fn simulate<R: Rng + ?Sized>(
    a: &CombinationMatrix,
    source: &SourceSpec,
    options: &SimulationOptions,
    rng: &mut R,
) -> Result<TrajectoryStats> {
    simulate_with(a, source, options, rng, |_, _| {})
}

/// [`simulate`] with a callback receiving `(step, observed outputs)` for each
/// retained step.
pub fn simulate_with<R: Rng + ?Sized, F: FnMut(usize, &[f64])>(
    a: &CombinationMatrix,
    source: &SourceSpec,
    options: &SimulationOptions,
    rng: &mut R,
    mut observer: F,
) -> Result<TrajectoryStats> {
    source.validate()?;
    let n = a.n();
    let burn_in = options.burn_in.unwrap_or_else(|| default_burn_in(a.rho()));
    if options.steps <= burn_in {
        return Err(Error::InvalidParameter { name: "steps", reason: "must exceed the burn-in" });
    }
    let observed = options.observed.clone().unwrap_or_else(|| ObservationSet::full(n));
    if let Some(&index) = observed.indices().last().filter(|&&i| i >= n) {
        return Err(Error::NodeOutOfRange { index, n });
    }
    let mut stats = TrajectoryStats::new(observed, burn_in, source.variance());
    let obs = stats.observed.indices().to_vec();

    let mut w = alloc::vec![0.0; n];
    let mut next = alloc::vec![0.0; n];
    let mut prev_obs = alloc::vec![0.0; obs.len()];
    let mut cur_obs = alloc::vec![0.0; obs.len()];
    for step in 1..=options.steps {
        a.matvec_into(&w, &mut next);
        let mut magnitude = 0.0f64;
        for v in next.iter_mut() {
            *v += source.sample(rng);
            magnitude = magnitude.max(v.abs());
        }
        if !(magnitude <= options.divergence_bound) {
            return Err(Error::Diverged { step, magnitude });
        }
        core::mem::swap(&mut w, &mut next);
        for (dst, &i) in cur_obs.iter_mut().zip(&obs) {
            *dst = w[i];
        }
        if step > burn_in {
            stats.record(&prev_obs, &cur_obs);
            observer(step, &cur_obs);
        }
        core::mem::swap(&mut prev_obs, &mut cur_obs);
    }
    Ok(stats)
}

/// Mean-centered sample correlations, divided by the source variance so that
/// they estimate the unit-variance closed forms. Both matrices are returned
/// exactly symmetric.
pub fn empirical_correlations(stats: &TrajectoryStats) -> Result<CorrelationPair> {
    if stats.retained < 2 {
        return Err(Error::InsufficientSamples { retained: stats.retained, required: 2 });
    }
    if !(stats.source_variance > 0.0) {
        return Err(Error::InvalidParameter { name: "source_variance", reason: "must be positive" });
    }
    let m = stats.dim();
    let t = stats.retained as f64;
    let mean = stats.mean();
    let mean_prev: Vec<f64> = stats.sum_prev.iter().map(|s| s / t).collect();
    let scale = 1.0 / stats.source_variance;

    let mut r0 = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let v = (stats.sum_outer_0[a * m + b] / t - mean[a] * mean[b]) * scale;
            r0[(a, b)] = v;
            r0[(b, a)] = v;
        }
        if !(r0[(a, a)] > 0.0) {
            return Err(Error::ZeroVariance { agent: stats.observed.indices()[a] });
        }
    }
    let mut r1 = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let ab = stats.sum_outer_1[a * m + b] / t - mean[a] * mean_prev[b];
            let ba = stats.sum_outer_1[b * m + a] / t - mean[b] * mean_prev[a];
            let v = 0.5 * (ab + ba) * scale;
            r1[(a, b)] = v;
            r1[(b, a)] = v;
        }
    }
    Ok(CorrelationPair { r0, r1, origin: Origin::Empirical { samples: stats.retained }, nodes: stats.observed.clone() })
}
