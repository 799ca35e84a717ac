use alloc::vec::Vec;

use crate::dynamics::CorrelationProvider;
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorKind};
use crate::graph::ObservationSet;
use crate::inference::adjacency::Adjacency;
use crate::inference::scoring::{classify, Classifier};

/// Estimator and classifier applied to every probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchConfig {
    pub kind: EstimatorKind,
    pub classifier: Classifier,
    /// Scaling used by the cluster classifier (realized mean degree).
    pub s_n: f64,
}

/// Every pair of patches probed jointly once; a lone patch is its own probe.
pub fn pairwise_probes(patches: &[ObservationSet]) -> Vec<ObservationSet> {
    if patches.len() == 1 {
        return patches.to_vec();
    }
    let mut probes = Vec::with_capacity(patches.len() * patches.len().saturating_sub(1) / 2);
    for i in 0..patches.len() {
        for j in (i + 1)..patches.len() {
            probes.push(patches[i].union(&patches[j]));
        }
    }
    probes
}

/// Outcome of a single probe, in the probe's own local indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub nodes: ObservationSet,
    pub decision: Adjacency,
    pub threshold: f64,
    pub degenerate: bool,
    pub condition: Option<f64>,
}

pub fn evaluate_probe(
    provider: &(impl CorrelationProvider + ?Sized),
    probe: &ObservationSet,
    config: &PatchConfig,
) -> Result<ProbeReport> {
    let pair = provider.correlations(probe)?;
    let est = estimate(config.kind, &pair)?;
    let c = classify(&est.values, config.classifier, config.s_n)?;
    Ok(ProbeReport {
        nodes: probe.clone(),
        decision: c.adjacency,
        threshold: c.threshold,
        degenerate: c.degenerate,
        condition: est.condition,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchOutcome {
    /// Union of all probed nodes; the adjacency is indexed by position here.
    pub nodes: ObservationSet,
    pub adjacency: Adjacency,
    /// Ordered pairs on which probes disagreed.
    pub conflicts: usize,
}

/// Majority vote per ordered pair over the probes that contain it; ties count
/// as connected. Counting makes the result independent of probe order.
pub fn aggregate_probes(reports: &[ProbeReport]) -> Result<PatchOutcome> {
    let Some(first) = reports.first() else {
        return Err(Error::InvalidParameter { name: "probes", reason: "at least one probe is required" });
    };
    let nodes = reports[1..].iter().fold(first.nodes.clone(), |acc, r| acc.union(&r.nodes));
    let m = nodes.len();
    let mut yes = alloc::vec![0u32; m * m];
    let mut no = alloc::vec![0u32; m * m];
    for report in reports {
        let local: Vec<usize> =
            report.nodes.indices().iter().map(|&g| nodes.position(g).expect("probe nodes are in the union")).collect();
        for (a, &l) in local.iter().enumerate() {
            for (b, &k) in local.iter().enumerate() {
                if a == b {
                    continue;
                }
                if report.decision.get(a, b) {
                    yes[l * m + k] += 1;
                } else {
                    no[l * m + k] += 1;
                }
            }
        }
    }
    let mut conflicts = 0;
    let mut adjacency = Adjacency::empty(m);
    for l in 0..m {
        for k in 0..m {
            if l == k {
                continue;
            }
            let (y, n) = (yes[l * m + k], no[l * m + k]);
            if y + n == 0 {
                let idx = nodes.indices();
                return Err(Error::UncoveredPair(idx[l], idx[k]));
            }
            conflicts += usize::from(y > 0 && n > 0);
            adjacency.set(l, k, y >= n);
        }
    }
    Ok(PatchOutcome { nodes, adjacency, conflicts })
}

pub fn reconstruct_from_probes(
    provider: &(impl CorrelationProvider + ?Sized),
    probes: &[ObservationSet],
    config: &PatchConfig,
) -> Result<(PatchOutcome, Vec<ProbeReport>)> {
    let reports = probes.iter().map(|p| evaluate_probe(provider, p, config)).collect::<Result<Vec<_>>>()?;
    Ok((aggregate_probes(&reports)?, reports))
}

/// Sequential tomography: probe every pair of patches and vote.
pub fn patch_reconstruct(
    provider: &(impl CorrelationProvider + ?Sized),
    patches: &[ObservationSet],
    config: &PatchConfig,
) -> Result<(PatchOutcome, Vec<ProbeReport>)> {
    reconstruct_from_probes(provider, &pairwise_probes(patches), config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> ObservationSet {
        ObservationSet::new(ix.to_vec(), 100).unwrap()
    }

    fn report(nodes: &[usize], decide: impl FnMut(usize, usize) -> bool) -> ProbeReport {
        ProbeReport {
            nodes: set(nodes),
            decision: Adjacency::from_fn(nodes.len(), decide),
            threshold: 0.0,
            degenerate: false,
            condition: None,
        }
    }

    #[test]
    fn four_patches_give_six_probes_covering_all_pairs() {
        let patches = [set(&[0, 1]), set(&[2, 3]), set(&[4, 5]), set(&[6, 7])];
        let probes = pairwise_probes(&patches);
        assert_eq!(probes.len(), 6);
        let reports: Vec<_> = probes.iter().map(|p| report(p.indices(), |_, _| false)).collect();
        let outcome = aggregate_probes(&reports).unwrap();
        assert_eq!(outcome.nodes.len(), 8);
        assert_eq!(outcome.adjacency.count(), 0);
    }

    #[test]
    fn single_patch_is_one_probe() {
        assert_eq!(pairwise_probes(&[set(&[3, 4, 5])]), [set(&[3, 4, 5])]);
    }

    #[test]
    fn uncovered_pairs_are_reported() {
        let reports = [report(&[0, 1], |_, _| true), report(&[2, 3], |_, _| true)];
        assert!(matches!(aggregate_probes(&reports), Err(Error::UncoveredPair(0, 2))));
    }

    #[test]
    fn ties_go_to_connected_and_majority_wins() {
        let a = report(&[0, 1, 2], |_, _| true);
        let b = report(&[0, 1, 3], |_, _| false);
        let c = report(&[0, 2, 3], |_, _| false);
        let d = report(&[1, 2, 3], |_, _| false);
        let outcome = aggregate_probes(&[a.clone(), b.clone(), c.clone(), d.clone()]).unwrap();
        // (0,1): one yes, one no -> connected. (0,2): yes, no -> connected.
        // (1,2): yes, no -> connected. Pairs with 3 only saw "no".
        assert_eq!(outcome.adjacency.count(), 6);
        assert!(outcome.adjacency.get(0, 1) && outcome.adjacency.get(2, 1));
        assert!(!outcome.adjacency.get(0, 3));
        assert_eq!(outcome.conflicts, 6);

        let reversed = aggregate_probes(&[d, c, b, a]).unwrap();
        assert_eq!(reversed, outcome);
    }
}
