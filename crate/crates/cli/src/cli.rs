//! The `graphtomo` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use graphtomo_core::dynamics::{
    analytic_correlations_on, empirical_correlations, simulate_with, AnalyticProvider, CorrelationPair,
    SimulationOptions, SourceSpec,
};
use graphtomo_core::graph::degree_stats;
use graphtomo_core::inference::{
    aggregate_probes, classify, error_rates, evaluate_probe, pairwise_probes, Classifier, PatchConfig,
};
use graphtomo_core::{
    build_laplacian, build_metropolis, estimate, gen_er, gen_partial_er, rng_from_seed, Adjacency,
    CombinationMatrix, Error as CoreError, EstimatorKind, Graph, ObservationSet, Regime,
};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiment::{run_experiment, summarize, write_results_csv, write_summary_json};
use crate::formats::{self, DecisionFlags, FormatError, TrajectoryWriter};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
}

impl CliError {
    /// 1 usage, 2 I/O or malformed input file, 3 config schema, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::DimensionMismatch { .. } | CoreError::NodeOutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "graphtomo", version, about = "Graph tomography experiments over VAR diffusion networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Dense,
    LogSparse,
    IntermediateSparse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Metropolis,
    Laplacian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Granger,
    OneLag,
    Residual,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Granger => EstimatorKind::Granger,
            EstimatorArg::OneLag => EstimatorKind::OneLag,
            EstimatorArg::Residual => EstimatorKind::Residual,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Cluster,
    Threshold,
}

#[derive(Debug, clap::Args)]
struct ClassifyArgs {
    #[arg(long, value_enum, default_value = "granger")]
    estimator: EstimatorArg,
    #[arg(long, value_enum, default_value = "cluster")]
    classifier: ClassifierArg,
    /// Threshold on unscaled entries (threshold classifier).
    #[arg(long)]
    tau: Option<f64>,
    /// Scaling for the cluster classifier; defaults to the mean degree of the
    /// network graph.
    #[arg(long)]
    s_n: Option<f64>,
}

impl ClassifyArgs {
    fn classifier(&self) -> Result<Classifier, CliError> {
        match (self.classifier, self.tau) {
            (ClassifierArg::Cluster, None) => Ok(Classifier::Cluster),
            (ClassifierArg::Cluster, Some(_)) => Err(CliError::Usage("--tau needs --classifier threshold".into())),
            (ClassifierArg::Threshold, Some(tau)) => Ok(Classifier::Threshold { tau }),
            (ClassifierArg::Threshold, None) => Err(CliError::Usage("--classifier threshold needs --tau".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random graph (edge-list output).
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "dense")]
        regime: RegimeArg,
        /// Connection probability (dense regime).
        #[arg(long)]
        p: Option<f64>,
        /// Constant in `c ln n / n` (log-sparse regime).
        #[arg(long, default_value_t = Regime::DEFAULT_LOG_SPARSE_C)]
        c: f64,
        /// Exponent in `(ln n)^(1+e) / n` (intermediate-sparse regime).
        #[arg(long, default_value_t = Regime::DEFAULT_INTERMEDIATE_EXPONENT)]
        exponent: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed subgraph placed on the first nodes (edge-list file).
        #[arg(long)]
        subgraph: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Build a combination matrix on a graph (matrix output).
    Matrix {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "metropolis")]
        rule: RuleArg,
        #[arg(long)]
        rho: f64,
        /// Laplacian scale in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Simulate the diffusion and write empirical correlations.
    Simulate {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Observed nodes, e.g. `1-10,15` (default: all).
        #[arg(long)]
        observe: Option<String>,
        /// Long-format CSV of the observed outputs after burn-in.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Correlation file (default: standard output).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Estimate and classify the subgraph among observed nodes.
    Estimate {
        /// Network matrix: analytic correlations are computed from it.
        #[arg(long, conflicts_with = "correlations", required_unless_present = "correlations")]
        matrix: Option<PathBuf>,
        /// Correlation file produced by `simulate`.
        #[arg(long)]
        correlations: Option<PathBuf>,
        /// Observed nodes, e.g. `1-10` (default: all nodes of the input).
        #[arg(long)]
        observe: Option<String>,
        /// Network graph: used for the default scaling and to score the decision.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        classify: ClassifyArgs,
        /// Estimated-submatrix file.
        #[arg(long)]
        estimate_output: Option<PathBuf>,
        /// Decision file (default: standard output).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a configured Monte Carlo sweep.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving `results.csv` and `summary.json`.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reconstruct a large probed set from pairwise probes of small patches.
    Patches {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        patches: usize,
        #[arg(long)]
        patch_size: usize,
        /// Label of the first node of the first patch; patches are consecutive blocks.
        #[arg(long, default_value_t = 1)]
        first: usize,
        /// Ground-truth graph to score the aggregate against.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| io_err(path, e))
}

fn read_with<T>(path: &Path, f: impl FnOnce(BufReader<File>) -> Result<T, FormatError>) -> Result<T, CliError> {
    f(open(path)?).map_err(|e| io_err(path, e))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?))),
        None => Ok(Box::new(BufWriter::new(std::io::stdout().lock()))),
    }
}

fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut w = sink(path)?;
    f(&mut w).and_then(|()| w.flush()).map_err(|e| io_err(&label, e))
}

fn node_list(text: Option<&str>, n: usize) -> Result<ObservationSet, CliError> {
    match text {
        Some(t) => formats::parse_node_list(t, n).map_err(|e| CliError::Usage(format!("--observe: {e}"))),
        None => Ok(ObservationSet::full(n)),
    }
}

/// Graph on the off-diagonal support of a matrix.
fn support_graph(a: &CombinationMatrix) -> Graph {
    let edges: Vec<(usize, usize)> = a.triplets().filter(|&(l, k, v)| l < k && v != 0.0).map(|(l, k, _)| (l, k)).collect();
    Graph::from_edges(a.n(), &edges).expect("matrix indices are in range")
}

fn scaling(arg: Option<f64>, graph: Option<&Graph>) -> Result<f64, CliError> {
    match (arg, graph) {
        (Some(s), _) => Ok(s),
        (None, Some(g)) => Ok(degree_stats(g).mean),
        (None, None) => Err(CliError::Usage("cannot infer --s-n: pass --s-n or --graph".into())),
    }
}

fn report_rates(decision: &Adjacency, truth: &Adjacency) -> Result<(), CliError> {
    let r = error_rates(decision, truth)?;
    eprintln!("e0={} e1={} exact={}", r.e0, r.e1, r.e0 == 0.0 && r.e1 == 0.0);
    Ok(())
}

fn run_command(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate { n, regime, p, c, exponent, seed, subgraph, output } => {
            let regime = match (regime, p) {
                (RegimeArg::Dense, Some(p)) => Regime::Dense { p },
                (RegimeArg::Dense, None) => return Err(CliError::Usage("--regime dense needs --p".into())),
                (_, Some(_)) => return Err(CliError::Usage("--p only applies to --regime dense".into())),
                (RegimeArg::LogSparse, None) => Regime::LogSparse { c },
                (RegimeArg::IntermediateSparse, None) => Regime::IntermediateSparse { exponent },
            };
            let prob = regime.probability(n)?;
            let mut rng = rng_from_seed(seed);
            let g = match subgraph {
                Some(path) => gen_partial_er(&read_with(&path, formats::read_edge_list)?, n, prob, &mut rng)?.0,
                None => gen_er(n, prob, &mut rng)?,
            };
            emit(output.as_deref(), |w| formats::write_edge_list(w, &g))
        }
        Command::Matrix { graph, rule, rho, lambda, output } => {
            let g = read_with(&graph, formats::read_edge_list)?;
            let a = match rule {
                RuleArg::Metropolis => build_metropolis(&g, rho)?,
                RuleArg::Laplacian => build_laplacian(&g, rho, lambda)?,
            };
            emit(output.as_deref(), |w| formats::write_matrix(w, &a))
        }
        Command::Simulate { matrix, steps, burn_in, seed, observe, trajectory, output } => {
            let a = read_with(&matrix, formats::read_matrix)?;
            let s = node_list(observe.as_deref(), a.n())?;
            let mut options = SimulationOptions::new(steps).observe(s.clone());
            if let Some(b) = burn_in {
                options = options.burn_in(b);
            }
            let mut rng = rng_from_seed(seed);
            let source = SourceSpec::StandardGaussian;
            let stats = match &trajectory {
                Some(path) => {
                    let file = File::create(path).map_err(|e| io_err(path, e))?;
                    let mut writer = TrajectoryWriter::new(BufWriter::new(file), &s).map_err(|e| io_err(path, e))?;
                    let mut failure = None;
                    let stats = simulate_with(&a, &source, &options, &mut rng, |t, values| {
                        if failure.is_none() {
                            failure = writer.record(t, values).err();
                        }
                    })?;
                    if let Some(e) = failure {
                        return Err(io_err(path, e));
                    }
                    writer.finish().map_err(|e| io_err(path, e))?;
                    stats
                }
                None => simulate_with(&a, &source, &options, &mut rng, |_, _| {})?,
            };
            let pair = empirical_correlations(&stats)?;
            emit(output.as_deref(), |w| formats::write_correlations(w, &pair))
        }
        Command::Estimate { matrix, correlations, observe, graph, classify: args, estimate_output, output } => {
            let classifier = args.classifier()?;
            let truth_graph = graph.as_deref().map(|p| read_with(p, formats::read_edge_list)).transpose()?;
            let (pair, network): (CorrelationPair, Option<Graph>) = match (matrix, correlations) {
                (Some(path), _) => {
                    let a = read_with(&path, formats::read_matrix)?;
                    let s = node_list(observe.as_deref(), a.n())?;
                    (analytic_correlations_on(&a, &s)?, Some(support_graph(&a)))
                }
                (None, Some(path)) => {
                    let full = read_with(&path, formats::read_correlations)?;
                    let pair = match observe.as_deref() {
                        Some(t) => full.restrict(&node_list(Some(t), usize::MAX)?)?,
                        None => full,
                    };
                    (pair, None)
                }
                (None, None) => return Err(CliError::Usage("pass --matrix or --correlations".into())),
            };
            let s_n = scaling(args.s_n, truth_graph.as_ref().or(network.as_ref()))?;
            let est = estimate(args.estimator.into(), &pair)?;
            let decision = classify(&est.values, classifier, s_n)?;
            if let Some(path) = &estimate_output {
                emit(Some(path), |w| formats::write_estimate(w, &est))?;
            }
            if let Some(g) = &truth_graph {
                if pair.nodes.indices().last().is_some_and(|&i| i >= g.n()) {
                    return Err(CliError::Usage("observed nodes exceed the --graph size".into()));
                }
                report_rates(&decision.adjacency, &Adjacency::from_graph(g, &pair.nodes))?;
            }
            let flags = DecisionFlags { nodes: pair.nodes.clone(), threshold: decision.threshold, degenerate: decision.degenerate };
            emit(output.as_deref(), |w| formats::write_decision(w, &decision.adjacency.to_graph(), &flags))
        }
        Command::Experiment { config, out_dir } => {
            let text = std::fs::read_to_string(&config).map_err(|e| io_err(&config, e))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let start = std::time::Instant::now();
            let results = run_experiment(&cfg);
            std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
            let csv_path = out_dir.join("results.csv");
            let file = File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
            write_results_csv(BufWriter::new(file), &results).map_err(|e| io_err(&csv_path, e))?;
            let json_path = out_dir.join("summary.json");
            let file = File::create(&json_path).map_err(|e| io_err(&json_path, e))?;
            write_summary_json(BufWriter::new(file), &summarize(&cfg, &results)).map_err(|e| io_err(&json_path, e))?;
            let failed = results.iter().flat_map(|r| &r.outcomes).filter(|o| o.result.is_err()).count();
            eprintln!(
                "{} trials in {:.1?}; {failed} failed rows; wrote {} and {}",
                results.len(),
                start.elapsed(),
                csv_path.display(),
                json_path.display()
            );
            Ok(())
        }
        Command::Patches { matrix, patches, patch_size, first, graph, classify: args, output } => {
            let classifier = args.classifier()?;
            if patches == 0 || patch_size == 0 || first == 0 {
                return Err(CliError::Usage("--patches, --patch-size and --first must be positive".into()));
            }
            let a = read_with(&matrix, formats::read_matrix)?;
            let start = first - 1;
            if start + patches * patch_size > a.n() {
                return Err(CliError::Usage(format!("patches exceed the {} network nodes", a.n())));
            }
            let sets: Vec<ObservationSet> = (0..patches)
                .map(|i| ObservationSet::new((start + i * patch_size..start + (i + 1) * patch_size).collect(), a.n()))
                .collect::<Result<_, _>>()?;
            let truth_graph = graph.as_deref().map(|p| read_with(p, formats::read_edge_list)).transpose()?;
            let s_n = match args.s_n {
                Some(s) => s,
                None => degree_stats(&support_graph(&a)).mean,
            };
            let config = PatchConfig { kind: args.estimator.into(), classifier, s_n };
            let provider = AnalyticProvider { matrix: &a };
            let probes = pairwise_probes(&sets);
            let reports =
                probes.par_iter().map(|p| evaluate_probe(&provider, p, &config)).collect::<Result<Vec<_>, _>>()?;
            for r in &reports {
                eprintln!("probe nodes={} threshold={:e} degenerate={}", r.nodes, r.threshold, r.degenerate);
            }
            let outcome = aggregate_probes(&reports)?;
            eprintln!("{} probes, {} conflicting ordered pairs", reports.len(), outcome.conflicts);
            if let Some(g) = &truth_graph {
                if outcome.nodes.indices().last().is_some_and(|&i| i >= g.n()) {
                    return Err(CliError::Usage("patches exceed the --graph size".into()));
                }
                report_rates(&outcome.adjacency, &Adjacency::from_graph(g, &outcome.nodes))?;
            }
            let flags = DecisionFlags {
                nodes: outcome.nodes.clone(),
                threshold: f64::NAN,
                degenerate: reports.iter().any(|r| r.degenerate),
            };
            emit(output.as_deref(), |w| formats::write_decision(w, &outcome.adjacency.to_graph(), &flags))
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
