use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::inference::adjacency::Adjacency;
use crate::inference::cluster::cluster_classify;

/// Declares `(l, k)` connected iff `values[(l, k)] > tau`. Both directions are
/// kept; use [`Adjacency::undirected_edges`] for an OR-symmetrized view.
pub fn classify_threshold(values: &DMatrix<f64>, tau: f64) -> Adjacency {
    Adjacency::from_fn(values.nrows(), |l, k| values[(l, k)] > tau)
}

/// Misclassification fractions over disconnected (`e0`) and connected (`e1`)
/// ordered pairs. An empty class has rate 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub e0: f64,
    pub e1: f64,
    pub n_disconnected: usize,
    pub n_connected: usize,
}

impl ErrorRates {
    pub fn total(&self) -> f64 {
        self.e0 + self.e1
    }
}

pub fn error_rates(decision: &Adjacency, truth: &Adjacency) -> Result<ErrorRates> {
    if decision.n() != truth.n() {
        return Err(Error::DimensionMismatch { expected: truth.n(), found: decision.n() });
    }
    let n = truth.n();
    let (mut n0, mut n1, mut miss0, mut miss1) = (0usize, 0usize, 0usize, 0usize);
    for l in 0..n {
        for k in 0..n {
            if l == k {
                continue;
            }
            if truth.get(l, k) {
                n1 += 1;
                miss1 += usize::from(!decision.get(l, k));
            } else {
                n0 += 1;
                miss0 += usize::from(decision.get(l, k));
            }
        }
    }
    let rate = |miss: usize, total: usize| if total == 0 { 0.0 } else { miss as f64 / total as f64 };
    Ok(ErrorRates { e0: rate(miss0, n0), e1: rate(miss1, n1), n_disconnected: n0, n_connected: n1 })
}

/// Extremal estimated entries per pair class, plus the scaled bias and gap
/// estimates. `None` marks an empty class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginReport {
    pub delta_lo: Option<f64>,
    pub delta_hi: Option<f64>,
    pub big_delta_lo: Option<f64>,
    pub big_delta_hi: Option<f64>,
    pub s_n: f64,
    /// `s_n * delta_hi`
    pub eta_hat: Option<f64>,
    /// `s_n * (Delta_lo - delta_hi)`
    pub gamma_hat: Option<f64>,
}

pub fn margins(values: &DMatrix<f64>, truth: &Adjacency, s_n: f64) -> Result<MarginReport> {
    let n = truth.n();
    if values.nrows() != n || values.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: values.nrows() });
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for l in 0..n {
        for k in 0..n {
            if l == k {
                continue;
            }
            let class = usize::from(truth.get(l, k));
            let v = values[(l, k)];
            lo[class] = lo[class].min(v);
            hi[class] = hi[class].max(v);
        }
    }
    let finite = |x: f64| x.is_finite().then_some(x);
    let delta_hi = finite(hi[0]);
    let big_delta_lo = finite(lo[1]);
    Ok(MarginReport {
        delta_lo: finite(lo[0]),
        delta_hi,
        big_delta_lo,
        big_delta_hi: finite(hi[1]),
        s_n,
        eta_hat: delta_hi.map(|d| s_n * d),
        gamma_hat: delta_hi.zip(big_delta_lo).map(|(d, big)| s_n * (big - d)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classifier {
    /// Fixed threshold on unscaled entries.
    Threshold { tau: f64 },
    /// Two-means on the scaled entries.
    Cluster,
}

/// A decision with the threshold that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub adjacency: Adjacency,
    /// Threshold on unscaled entries.
    pub threshold: f64,
    pub degenerate: bool,
}

pub fn classify(values: &DMatrix<f64>, classifier: Classifier, s_n: f64) -> Result<Classification> {
    match classifier {
        Classifier::Threshold { tau } => {
            Ok(Classification { adjacency: classify_threshold(values, tau), threshold: tau, degenerate: false })
        }
        Classifier::Cluster => {
            let (adjacency, summary) = cluster_classify(values, s_n)?;
            Ok(Classification { adjacency, threshold: summary.threshold, degenerate: summary.degenerate })
        }
    }
}

/// Error rates at `tau = -inf` and at every distinct off-diagonal entry, in
/// increasing order of `tau`. One sorted pass: raising `tau` past a value
/// flips exactly the pairs carrying it to "disconnected".
pub fn threshold_sweep(values: &DMatrix<f64>, truth: &Adjacency) -> Result<Vec<(f64, ErrorRates)>> {
    let n = truth.n();
    if values.nrows() != n || values.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: values.nrows() });
    }
    let mut entries: Vec<(f64, bool)> = (0..n)
        .flat_map(|l| (0..n).filter(move |&k| k != l).map(move |k| (l, k)))
        .map(|(l, k)| (values[(l, k)], truth.get(l, k)))
        .collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n_connected = entries.iter().filter(|e| e.1).count();
    let n_disconnected = entries.len() - n_connected;
    let rate = |miss: usize, total: usize| if total == 0 { 0.0 } else { miss as f64 / total as f64 };
    let rates = |false_pos: usize, false_neg: usize| ErrorRates {
        e0: rate(false_pos, n_disconnected),
        e1: rate(false_neg, n_connected),
        n_disconnected,
        n_connected,
    };
    // Below every entry all pairs are declared connected.
    let (mut false_pos, mut false_neg) = (n_disconnected, 0);
    let mut out = alloc::vec![(f64::NEG_INFINITY, rates(false_pos, false_neg))];
    let mut i = 0;
    while i < entries.len() {
        let tau = entries[i].0;
        while i < entries.len() && entries[i].0 == tau {
            if entries[i].1 {
                false_neg += 1;
            } else {
                false_pos -= 1;
            }
            i += 1;
        }
        out.push((tau, rates(false_pos, false_neg)));
    }
    Ok(out)
}
