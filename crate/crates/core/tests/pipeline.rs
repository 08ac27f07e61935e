mod common;

use std::path::Path;

use common::*;
use hybrid_forecast::config::RunConfig;
use hybrid_forecast::eval::{
    Comparison, COMPARISON_CSV, CUMULATIVE_CSV, HISTOGRAM_CSV, METRICS_CSV, METRICS_TXT, PLOT_SCRIPT,
};
use hybrid_forecast::ingest::write_csv;
use hybrid_forecast::pipeline::{
    cmd_evaluate, cmd_forecast, cmd_train, load_prepared, raw_data_path, CONFIG_ECHO, REPORT_CSV, TRAINING_LOG,
};
use hybrid_forecast::Error;

fn small_config(root: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.lstm.units = vec![8, 4];
    cfg.lstm.epochs = 2;
    cfg.paths.data_cache = root.join("cache");
    cfg.paths.model_dir = root.join("model");
    cfg.paths.output_dir = root.join("out");
    cfg
}

fn seed_cache(cfg: &RunConfig) {
    let days = (cfg.end_date - cfg.start_date).num_days() as usize + 1;
    let series = synthetic_weather(cfg.start_date, days, 23);
    std::fs::create_dir_all(&cfg.paths.data_cache).unwrap();
    write_csv(&series, raw_data_path(cfg)).unwrap();
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn full_pipeline_on_cached_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    seed_cache(&cfg);
    assert_eq!(load_prepared(&cfg).unwrap().len(), 1461);

    let (model, log) = cmd_train(&cfg).unwrap();
    assert_eq!(model.training_end, date("2023-03-13"));
    let text = String::from_utf8(read(&cfg.paths.model_dir.join(TRAINING_LOG))).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("epoch ")).count(), 2);
    assert!(text.starts_with(&format!("sarima_loglik {}", log.sarima_loglik)));
    let echoed: RunConfig = serde_json::from_slice(&read(&cfg.paths.model_dir.join(CONFIG_ECHO))).unwrap();
    assert_eq!(echoed, cfg);

    let out = cmd_forecast(&cfg).unwrap();
    assert_eq!(out.report.len(), 293);
    assert_eq!(out.report.records[0].date, date("2023-03-14"));
    assert_eq!(out.report.records[292].date, date("2023-12-31"));
    assert!(out.report.records.iter().all(|r| r.actual.is_some()));
    let comparison = Comparison::from_csv(&cfg.paths.output_dir.join(COMPARISON_CSV)).unwrap();
    assert_eq!(comparison.models.len(), 3);
    assert_eq!(comparison.dates.len(), 293);

    let summaries = cmd_evaluate(&cfg).unwrap();
    assert_eq!(summaries.len(), 3);
    assert!(summaries.windows(2).all(|w| w[0].mae <= w[1].mae));
    let out_dir = &cfg.paths.output_dir;
    for f in [METRICS_CSV, COMPARISON_CSV, CUMULATIVE_CSV, HISTOGRAM_CSV, METRICS_TXT, PLOT_SCRIPT, REPORT_CSV, CONFIG_ECHO] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let csvs = std::fs::read_dir(out_dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    // Four evaluation tables plus the detailed forecast report.
    assert_eq!(csvs, 5);
    let metrics = String::from_utf8(read(&out_dir.join(METRICS_CSV))).unwrap();
    assert_eq!(metrics.lines().count(), 4);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let mut cfg = small_config(dir);
        cfg.lstm.epochs = 1;
        seed_cache(&cfg);
        cmd_train(&cfg).unwrap();
        cmd_forecast(&cfg).unwrap();
        cmd_evaluate(&cfg).unwrap();
    }
    for sub in ["model", "out"] {
        let mut names: Vec<_> = std::fs::read_dir(a.path().join(sub))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            if name == CONFIG_ECHO {
                continue;
            }
            let pa = a.path().join(sub).join(&name);
            let pb = b.path().join(sub).join(&name);
            assert_eq!(read(&pa), read(&pb), "{}", pa.display());
        }
    }
}

#[test]
fn horizon_override_and_uncovered_days() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.lstm.epochs = 1;
    cfg.models = vec!["hybrid".into(), "sarima_only".into()];
    seed_cache(&cfg);
    cmd_train(&cfg).unwrap();

    cfg.horizon = Some(10);
    let out = cmd_forecast(&cfg).unwrap();
    assert_eq!(out.report.len(), 10);
    assert!(out.report.records.iter().all(|r| r.lstm_only.is_none()));
    let comparison = Comparison::from_csv(&cfg.paths.output_dir.join(COMPARISON_CSV)).unwrap();
    assert_eq!(comparison.models.len(), 2);
    assert_eq!(cmd_evaluate(&cfg).unwrap().len(), 2);

    // Past the end of the data there is nothing to score against.
    cfg.horizon = Some(300);
    let out = cmd_forecast(&cfg).unwrap();
    assert_eq!(out.report.records.iter().filter(|r| r.actual.is_none()).count(), 7);
    let err = cmd_evaluate(&cfg).unwrap_err();
    assert!(err.to_string().contains("not covered"), "{err}");
}

#[test]
fn missing_inputs_are_missing_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    assert!(matches!(cmd_train(&cfg), Err(Error::MissingArtifact(_))));
    seed_cache(&cfg);
    assert!(matches!(cmd_forecast(&cfg), Err(Error::MissingArtifact(_))));
    assert!(matches!(cmd_evaluate(&cfg), Err(Error::MissingArtifact(_))));
}

#[test]
fn changed_split_requires_retraining() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.lstm.epochs = 1;
    seed_cache(&cfg);
    cmd_train(&cfg).unwrap();
    cfg.test_days = 200;
    let err = cmd_forecast(&cfg).unwrap_err();
    assert!(err.to_string().contains("retrain"), "{err}");
}

#[test]
fn perfect_predictions_score_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let actual = vec![3.0, -1.5, 7.25, 0.0];
    let comparison = Comparison {
        dates: (0..4).map(|i| date("2023-01-01") + chrono::Days::new(i)).collect(),
        actual: actual.clone(),
        models: ["hybrid", "sarima_only", "lstm_only"]
            .iter()
            .map(|n| (n.to_string(), actual.clone()))
            .collect(),
    };
    std::fs::create_dir_all(&cfg.paths.output_dir).unwrap();
    comparison.to_csv(&cfg.paths.output_dir.join(COMPARISON_CSV)).unwrap();
    let summaries = cmd_evaluate(&cfg).unwrap();
    assert_eq!(summaries.len(), 3);
    assert!(summaries.iter().all(|s| s.mae == 0.0 && s.rmse == 0.0 && s.n == 4));
}
