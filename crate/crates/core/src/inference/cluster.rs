use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::inference::adjacency::Adjacency;

/// Centers closer than this fraction of the larger center count as one cluster.
pub const DEGENERATE_SEPARATION: f64 = 1e-3;

/// Result of a 1-D two-means split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMeans {
    pub low_center: f64,
    pub high_center: f64,
    /// Midpoint of the two centers; values `> threshold` are in the high cluster.
    pub threshold: f64,
    pub low_count: usize,
    pub high_count: usize,
    pub iterations: usize,
}

/// Lloyd's algorithm in one dimension, started from the extremes and run
/// until the split stops moving. Because clusters are intervals of the sorted
/// values, each iteration is a binary search plus two prefix-sum lookups.
pub fn two_means_1d(values: &[f64]) -> Result<TwoMeans> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter { name: "values", reason: "need at least two entries" });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter { name: "values", reason: "entries must be finite" });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
    if first == last {
        return Err(Error::DegenerateClustering);
    }
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in &sorted {
        acc += v;
        prefix.push(acc);
    }
    let total = sorted.len();
    let (mut low, mut high) = (first, last);
    let mut split = usize::MAX;
    let mut iterations = 0;
    loop {
        let threshold = 0.5 * (low + high);
        // The minimum is always <= threshold and the maximum always above,
        // so both clusters stay nonempty.
        let next = sorted.partition_point(|&v| v <= threshold);
        if next == split {
            return Ok(TwoMeans {
                low_center: low,
                high_center: high,
                threshold,
                low_count: split,
                high_count: total - split,
                iterations,
            });
        }
        split = next;
        iterations += 1;
        low = prefix[split] / split as f64;
        high = (prefix[total] - prefix[split]) / (total - split) as f64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSummary {
    pub low_center: f64,
    pub high_center: f64,
    /// Midpoint of the centers, on the scaled entries.
    pub scaled_threshold: f64,
    /// The same threshold on the unscaled entries.
    pub threshold: f64,
    /// Centers too close to call two clusters; every pair was declared
    /// disconnected.
    pub degenerate: bool,
    pub low_count: usize,
    pub high_count: usize,
    pub iterations: usize,
}

/// Two-means on the scaled off-diagonal entries `s_n * est(l, k)`; pairs in
/// the higher cluster are declared connected.
pub fn cluster_classify(est: &DMatrix<f64>, s_n: f64) -> Result<(Adjacency, ClusterSummary)> {
    if !(s_n.is_finite() && s_n > 0.0) {
        return Err(Error::InvalidParameter { name: "s_n", reason: "scaling must be positive and finite" });
    }
    let n = est.nrows();
    if est.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: est.ncols() });
    }
    let scaled: Vec<f64> = (0..n)
        .flat_map(|l| (0..n).filter(move |&k| k != l).map(move |k| (l, k)))
        .map(|(l, k)| s_n * est[(l, k)])
        .collect();
    let split = two_means_1d(&scaled)?;
    let scale = split.low_center.abs().max(split.high_center.abs());
    let degenerate = split.high_center - split.low_center < DEGENERATE_SEPARATION * scale;
    let adjacency = if degenerate {
        Adjacency::empty(n)
    } else {
        Adjacency::from_fn(n, |l, k| s_n * est[(l, k)] > split.threshold)
    };
    let summary = ClusterSummary {
        low_center: split.low_center,
        high_center: split.high_center,
        scaled_threshold: split.threshold,
        threshold: split.threshold / s_n,
        degenerate,
        low_count: split.low_count,
        high_count: split.high_count,
        iterations: split.iterations,
    };
    Ok((adjacency, summary))
}
