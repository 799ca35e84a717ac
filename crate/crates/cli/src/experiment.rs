//! Monte Carlo sweeps: one trial per `(n, trial index)`, each with its own
//! derived seed, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::{Duration, Instant};

use graphtomo_core::dynamics::{
    analytic_correlations_on, empirical_correlations, simulate, CorrelationPair, SimulationOptions,
};
use graphtomo_core::graph::{degree_stats, gen_er, gen_partial_er};
use graphtomo_core::inference::{classify, error_rates, margins, theory_bias_gap};
use graphtomo_core::{
    derive_seed, estimate, rng_from_seed, Adjacency, DegreeStats, ErrorRates, EstimatorKind, MarginReport,
    ObservationSet, TheoryPrediction,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CorrelationSpec, ExperimentConfig, ProbedSpec};

/// Environment variable holding the worker count (unset or 0: all cores).
pub const WORKERS_ENV: &str = "GRAPHTOMO_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorMetrics {
    pub rates: ErrorRates,
    pub margins: MarginReport,
    pub theory: Option<TheoryPrediction>,
    pub condition: Option<f64>,
    /// Threshold on unscaled entries used for the decision.
    pub threshold: f64,
    pub degenerate: bool,
    pub wall_time: Duration,
}

impl EstimatorMetrics {
    pub fn exact(&self) -> bool {
        self.rates.e0 == 0.0 && self.rates.e1 == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutcome {
    pub kind: EstimatorKind,
    pub result: Result<EstimatorMetrics, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub probed: usize,
    /// `probed / n`
    pub xi: f64,
    pub p: f64,
    pub degrees: Option<DegreeStats>,
    /// One entry per configured estimator, in config order.
    pub outcomes: Vec<EstimatorOutcome>,
    pub wall_time: Duration,
}

struct Instance {
    truth: Adjacency,
    degrees: DegreeStats,
    pair: CorrelationPair,
}

fn build_instance(config: &ExperimentConfig, n: usize, p: f64, seed: u64) -> graphtomo_core::Result<Instance> {
    let mut rng = rng_from_seed(seed);
    let (g, s) = match &config.probed {
        ProbedSpec::Subgraph { .. } => {
            let sub = config.probed.fixed_subgraph().expect("validated subgraph");
            gen_partial_er(&sub, n, p, &mut rng)?
        }
        other => (gen_er(n, p, &mut rng)?, ObservationSet::first(other.size(n))),
    };
    let a = config.matrix.build(&g)?;
    let pair = match config.correlations {
        CorrelationSpec::Analytic => analytic_correlations_on(&a, &s)?,
        CorrelationSpec::Empirical { steps, burn_in, innovation } => {
            let mut options = SimulationOptions::new(steps).observe(s.clone());
            if let Some(b) = burn_in {
                options = options.burn_in(b);
            }
            empirical_correlations(&simulate(&a, &innovation.source(), &options, &mut rng)?)?
        }
    };
    Ok(Instance { truth: Adjacency::from_graph(&g, &s), degrees: degree_stats(&g), pair })
}

fn score(
    config: &ExperimentConfig,
    inst: &Instance,
    kind: EstimatorKind,
    xi: f64,
    p: f64,
) -> Result<EstimatorMetrics, String> {
    let start = Instant::now();
    let s_n = inst.degrees.mean;
    let est = estimate(kind, &inst.pair).map_err(|e| e.to_string())?;
    let decision = classify(&est.values, config.classifier.classifier(), s_n).map_err(|e| e.to_string())?;
    let rates = error_rates(&decision.adjacency, &inst.truth).map_err(|e| e.to_string())?;
    let margins = margins(&est.values, &inst.truth, s_n).map_err(|e| e.to_string())?;
    let theory = theory_bias_gap(kind, config.matrix.rho(), config.matrix.kappa(), xi, p).ok();
    Ok(EstimatorMetrics {
        rates,
        margins,
        theory,
        condition: est.condition,
        threshold: decision.threshold,
        degenerate: decision.degenerate,
        wall_time: start.elapsed(),
    })
}

/// Runs one trial. Failures are recorded in the outcomes rather than returned.
pub fn run_trial(config: &ExperimentConfig, n: usize, trial: u64) -> TrialResult {
    let start = Instant::now();
    let seed = derive_seed(config.master_seed, trial, n as u64);
    let probed = config.probed.size(n);
    let xi = probed as f64 / n as f64;
    let p = config.regime.regime().probability(n);
    let instance = p.clone().and_then(|p| build_instance(config, n, p, seed));
    let p = p.unwrap_or(f64::NAN);
    let outcomes = config
        .estimators
        .iter()
        .map(|&kind| EstimatorOutcome {
            kind,
            result: match &instance {
                Ok(inst) => score(config, inst, kind, xi, p),
                Err(e) => Err(e.to_string()),
            },
        })
        .collect();
    TrialResult {
        n,
        trial,
        seed,
        probed,
        xi,
        p,
        degrees: instance.as_ref().ok().map(|i| i.degrees),
        outcomes,
        wall_time: start.elapsed(),
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn configured_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&w| w > 0)
}

/// Runs every `(n, trial)` cell on a worker pool and returns the results
/// sorted by `(n, trial)`.
pub fn run_experiment(config: &ExperimentConfig) -> Vec<TrialResult> {
    let cells: Vec<(usize, u64)> =
        config.n_list.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = configured_workers() {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().expect("worker pool");
    let mut results: Vec<TrialResult> =
        pool.install(|| cells.par_iter().map(|&(n, t)| run_trial(config, n, t)).collect());
    results.sort_by_key(|r| (r.n, r.trial));
    results
}

/// One CSV row per `(n, trial, estimator)`. Undefined values are empty cells.
/// Wall time is deliberately absent so that reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub probed: usize,
    pub xi: f64,
    pub p: f64,
    pub d_min: Option<usize>,
    pub d_max: Option<usize>,
    pub d_mean: Option<f64>,
    pub estimator: String,
    /// `ok` or `error`
    pub status: String,
    pub e0: Option<f64>,
    pub e1: Option<f64>,
    pub n_disconnected: Option<usize>,
    pub n_connected: Option<usize>,
    pub exact: Option<bool>,
    pub disc_lo: Option<f64>,
    pub disc_hi: Option<f64>,
    pub conn_lo: Option<f64>,
    pub conn_hi: Option<f64>,
    pub s_n: Option<f64>,
    pub eta_hat: Option<f64>,
    pub gamma_hat: Option<f64>,
    pub eta_theory: Option<f64>,
    pub gamma_theory: Option<f64>,
    pub condition: Option<f64>,
    pub threshold: Option<f64>,
    pub degenerate: Option<bool>,
    pub error: String,
}

pub const CSV_COLUMNS: [&str; 29] = [
    "n", "trial", "seed", "probed", "xi", "p", "d_min", "d_max", "d_mean", "estimator", "status", "e0", "e1",
    "n_disconnected", "n_connected", "exact", "disc_lo", "disc_hi", "conn_lo", "conn_hi", "s_n", "eta_hat",
    "gamma_hat", "eta_theory", "gamma_theory", "condition", "threshold", "degenerate", "error",
];

pub fn csv_rows(result: &TrialResult) -> Vec<CsvRow> {
    result
        .outcomes
        .iter()
        .map(|o| {
            let ok = o.result.as_ref().ok();
            let m = ok.map(|m| &m.margins);
            CsvRow {
                n: result.n,
                trial: result.trial,
                seed: result.seed,
                probed: result.probed,
                xi: result.xi,
                p: result.p,
                d_min: result.degrees.map(|d| d.min),
                d_max: result.degrees.map(|d| d.max),
                d_mean: result.degrees.map(|d| d.mean),
                estimator: o.kind.name().to_string(),
                status: if ok.is_some() { "ok" } else { "error" }.to_string(),
                e0: ok.map(|m| m.rates.e0),
                e1: ok.map(|m| m.rates.e1),
                n_disconnected: ok.map(|m| m.rates.n_disconnected),
                n_connected: ok.map(|m| m.rates.n_connected),
                exact: ok.map(EstimatorMetrics::exact),
                disc_lo: m.and_then(|m| m.delta_lo),
                disc_hi: m.and_then(|m| m.delta_hi),
                conn_lo: m.and_then(|m| m.big_delta_lo),
                conn_hi: m.and_then(|m| m.big_delta_hi),
                s_n: m.map(|m| m.s_n),
                eta_hat: m.and_then(|m| m.eta_hat),
                gamma_hat: m.and_then(|m| m.gamma_hat),
                eta_theory: ok.and_then(|m| m.theory).map(|t| t.eta),
                gamma_theory: ok.and_then(|m| m.theory).map(|t| t.gamma),
                condition: ok.and_then(|m| m.condition),
                threshold: ok.map(|m| m.threshold),
                degenerate: ok.map(|m| m.degenerate),
                error: o.result.as_ref().err().cloned().unwrap_or_default(),
            }
        })
        .collect()
}

pub fn write_results_csv(w: impl Write, results: &[TrialResult]) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(w);
    for row in results.iter().flat_map(csv_rows) {
        writer.serialize(row)?;
    }
    if results.iter().all(|r| r.outcomes.is_empty()) {
        writer.write_record(CSV_COLUMNS)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_results_csv(r: impl Read) -> Result<Vec<CsvRow>, csv::Error> {
    csv::Reader::from_reader(r).deserialize().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

impl MeanStd {
    /// Mean and sample standard deviation; `None` when there are no values.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = if count > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        Some(MeanStd { mean, stddev: var.sqrt(), count })
    }
}

/// Aggregates for one `(n, estimator)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub estimator: String,
    pub trials: usize,
    pub failed: usize,
    pub exact_fraction: Option<f64>,
    pub e0: Option<MeanStd>,
    pub e1: Option<MeanStd>,
    pub eta_hat: Option<MeanStd>,
    pub gamma_hat: Option<MeanStd>,
    pub eta_theory: Option<MeanStd>,
    pub gamma_theory: Option<MeanStd>,
    pub d_mean: Option<MeanStd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
}

pub fn summarize(config: &ExperimentConfig, results: &[TrialResult]) -> Summary {
    let mut groups: BTreeMap<(usize, usize), Vec<CsvRow>> = BTreeMap::new();
    for r in results {
        for (i, row) in csv_rows(r).into_iter().enumerate() {
            groups.entry((r.n, i)).or_default().push(row);
        }
    }
    let cells = groups
        .into_values()
        .map(|rows| {
            let pick = |f: fn(&CsvRow) -> Option<f64>| MeanStd::of(&rows.iter().filter_map(f).collect::<Vec<_>>());
            let ok: Vec<&CsvRow> = rows.iter().filter(|r| r.status == "ok").collect();
            CellSummary {
                n: rows[0].n,
                estimator: rows[0].estimator.clone(),
                trials: rows.len(),
                failed: rows.len() - ok.len(),
                exact_fraction: (!ok.is_empty())
                    .then(|| ok.iter().filter(|r| r.exact == Some(true)).count() as f64 / ok.len() as f64),
                e0: pick(|r| r.e0),
                e1: pick(|r| r.e1),
                eta_hat: pick(|r| r.eta_hat),
                gamma_hat: pick(|r| r.gamma_hat),
                eta_theory: pick(|r| r.eta_theory),
                gamma_theory: pick(|r| r.gamma_theory),
                d_mean: pick(|r| r.d_mean),
            }
        })
        .collect();
    Summary { config: config.clone(), cells }
}

pub fn write_summary_json(w: impl Write, summary: &Summary) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(w, summary)
}
