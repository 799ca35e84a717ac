use graphtomo::config::{ConfigError, ExperimentConfig};
use graphtomo::experiment::{read_results_csv, run_experiment, summarize, write_results_csv, CSV_COLUMNS};

fn config(extra: &str) -> String {
    format!(
        r#"{{
  "schema_version": 1,
  "regime": {{ "kind": "dense", "p": 0.3 }},
  "n_list": [30, 60],
  "probed": {{ "kind": "fraction", "fraction": 0.2 }},
  "matrix": {{ "rule": "metropolis", "rho": 0.5 }},
  "estimators": ["granger", "one-lag", "residual"],
  "correlations": {{ "source": "analytic" }},
  "classifier": {{ "kind": "cluster" }},
  "trials": 4,
  "master_seed": 99{extra}
}}"#
    )
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let mut out = Vec::new();
    write_results_csv(&mut out, &run_experiment(cfg)).unwrap();
    out
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = ExperimentConfig::from_json(&config("")).unwrap();
    assert_eq!(csv_bytes(&cfg), csv_bytes(&cfg));
}

#[test]
fn rows_follow_the_documented_schema_and_round_trip() {
    let cfg = ExperimentConfig::from_json(&config("")).unwrap();
    let results = run_experiment(&cfg);
    assert_eq!(results.len(), 8);
    assert!(results.windows(2).all(|w| (w[0].n, w[0].trial) < (w[1].n, w[1].trial)));
    let bytes = csv_bytes(&cfg);
    let header = std::str::from_utf8(&bytes).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, CSV_COLUMNS.join(","));
    let rows = read_results_csv(bytes.as_slice()).unwrap();
    assert_eq!(rows.len(), 24);
    let again: Vec<_> = results.iter().flat_map(graphtomo::experiment::csv_rows).collect();
    assert_eq!(rows, again);
}

#[test]
fn full_observation_granger_is_exact_in_every_trial() {
    let text = config("").replace(r#""kind": "fraction", "fraction": 0.2"#, r#""kind": "fraction", "fraction": 1.0"#);
    let cfg = ExperimentConfig::from_json(&text).unwrap();
    for r in run_experiment(&cfg) {
        let granger = r.outcomes[0].result.as_ref().unwrap();
        assert_eq!((granger.rates.e0, granger.rates.e1), (0.0, 0.0), "n={} trial={}", r.n, r.trial);
    }
}

#[test]
fn failures_are_recorded_not_fatal() {
    // One retained sample cannot give correlations; every row records that.
    let text = config("")
        .replace(r#"{ "source": "analytic" }"#, r#"{ "source": "empirical", "steps": 3, "burn_in": 2 }"#);
    let cfg = ExperimentConfig::from_json(&text).unwrap();
    let results = run_experiment(&cfg);
    assert_eq!(results.len(), 8);
    let rows: Vec<_> = results.iter().flat_map(graphtomo::experiment::csv_rows).collect();
    assert!(rows.iter().all(|r| r.status == "error" && !r.error.is_empty()));
    let summary = summarize(&cfg, &results);
    assert!(summary.cells.iter().all(|c| c.failed == c.trials));
}

#[test]
fn summary_groups_by_size_and_estimator() {
    let cfg = ExperimentConfig::from_json(&config("")).unwrap();
    let summary = summarize(&cfg, &run_experiment(&cfg));
    assert_eq!(summary.cells.len(), 6);
    assert!(summary.cells.iter().all(|c| c.trials == 4 && c.e0.is_some()));
    let json = serde_json::to_string(&summary).unwrap();
    assert!(json.contains("\"exact_fraction\""));
}

#[test]
fn schema_problems_are_reported() {
    let wrong_version = config("").replace("\"schema_version\": 1", "\"schema_version\": 2");
    assert!(matches!(ExperimentConfig::from_json(&wrong_version), Err(ConfigError::Version { found: 2 })));
    let zero_trials = config("").replace("\"trials\": 4", "\"trials\": 0");
    assert!(matches!(ExperimentConfig::from_json(&zero_trials), Err(ConfigError::Invalid(_))));
    let unknown_field = config(",\n  \"colour\": 3");
    assert!(matches!(ExperimentConfig::from_json(&unknown_field), Err(ConfigError::Json(_))));
    let bad_estimator = config("").replace("\"residual\"", "\"lasso\"");
    assert!(ExperimentConfig::from_json(&bad_estimator).is_err());
}

#[test]
fn config_round_trips_through_json() {
    let cfg = ExperimentConfig::from_json(&config("")).unwrap();
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn dense_granger_bias_estimate_matches_theory() {
    let text = r#"{
  "schema_version": 1,
  "regime": { "kind": "dense", "p": 0.3 },
  "n_list": [2000],
  "probed": { "kind": "fraction", "fraction": 0.2 },
  "matrix": { "rule": "metropolis", "rho": 0.5 },
  "estimators": ["granger"],
  "correlations": { "source": "analytic" },
  "classifier": { "kind": "cluster" },
  "trials": 2,
  "master_seed": 17
}"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let summary = summarize(&cfg, &run_experiment(&cfg));
    let cell = &summary.cells[0];
    let eta_hat = cell.eta_hat.unwrap().mean;
    let eta = cell.eta_theory.unwrap().mean;
    assert!((eta - 0.0375).abs() < 1e-12);
    assert!((eta_hat - eta).abs() <= 0.15 * eta, "eta_hat {eta_hat} vs theory {eta}");
}

#[test]
fn shipped_configs_are_valid() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 3);
}
