use std::path::Path;
use std::process::{Command, Output};

use hybrid_forecast::config::RunConfig;
use hybrid_forecast::ingest::{write_csv, DailySeries};
use hybrid_forecast::pipeline::raw_data_path;

fn forecast(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forecast"))
        .args(args)
        .current_dir(dir)
        .env_remove("FORECAST_CACHE_DIR")
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn small_config(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.lstm.units = vec![4, 2];
    cfg.lstm.epochs = 1;
    cfg.paths.data_cache = dir.join("cache");
    cfg.paths.model_dir = dir.join("model");
    cfg.paths.output_dir = dir.join("out");
    cfg
}

fn write_config(dir: &Path, cfg: &RunConfig) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

/// Annual cycle plus a deterministic wobble; enough structure to train on.
fn cache_series(cfg: &RunConfig) {
    let days = (cfg.end_date - cfg.start_date).num_days() as usize + 1;
    let mut cols: [Vec<f64>; 5] = Default::default();
    for i in 0..days {
        let t = i as f64;
        let temp = 13.0 + 11.0 * (2.0 * std::f64::consts::PI * (t - 110.0) / 365.25).sin() + 2.0 * (t * 0.7).sin();
        cols[0].push(temp);
        cols[1].push(temp - 5.0 + (t * 1.3).cos());
        cols[2].push(1015.0 + 6.0 * (t * 0.31).sin());
        cols[3].push(12.0 + 3.0 * (t * 0.17).cos());
        cols[4].push(20.0 + 2.0 * (t * 0.05).sin());
    }
    let series = DailySeries::from_values(cfg.start_date, cols).unwrap();
    std::fs::create_dir_all(&cfg.paths.data_cache).unwrap();
    write_csv(&series, raw_data_path(cfg)).unwrap();
}

#[test]
fn bad_coordinates_exit_2_naming_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = forecast(dir.path(), &["fetch", "--override", "location.latitude=123"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("latitude"), "{}", stderr(&out));

    let out = forecast(dir.path(), &["fetch", "--override", "location.longitude=-200"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("longitude"));
}

#[test]
fn unknown_override_key_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = forecast(dir.path(), &["config", "--override", "lstm.epoch=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lstm.epoch"));
}

#[test]
fn missing_data_file_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let path = write_config(dir.path(), &cfg);
    let out = forecast(dir.path(), &["train", "--config", &path]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("missing artifact"));
}

#[test]
fn missing_model_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    cache_series(&cfg);
    let path = write_config(dir.path(), &cfg);
    let out = forecast(dir.path(), &["forecast", "--config", &path]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn missing_config_file_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = forecast(dir.path(), &["config", "--config", "nope.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_echo_shows_published_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = forecast(dir.path(), &["config", "--override", "horizon=10"]);
    assert!(out.status.success());
    let cfg: RunConfig = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cfg.test_days, 293);
    assert_eq!(cfg.window, 14);
    assert_eq!(cfg.horizon(), 10);
    assert_eq!(cfg.lstm.units, vec![64, 32]);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_forecast"))
        .args(["config"])
        .current_dir(dir.path())
        .env("FORECAST_CACHE_DIR", "/somewhere/else")
        .output()
        .unwrap();
    let cfg: RunConfig = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cfg.paths.data_cache, Path::new("/somewhere/else"));
}

#[test]
fn train_forecast_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    cache_series(&cfg);
    let path = write_config(dir.path(), &cfg);

    let out = forecast(dir.path(), &["train", "--config", &path, "--override", "lstm.epochs=2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let log = std::fs::read_to_string(cfg.paths.model_dir.join("training_log.txt")).unwrap();
    assert_eq!(log.lines().filter(|l| l.starts_with("epoch ")).count(), 2);
    assert!(log.starts_with("sarima_loglik "));

    let out = forecast(dir.path(), &["forecast", "--config", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let comparison = std::fs::read_to_string(cfg.paths.output_dir.join("forecast_comparison.csv")).unwrap();
    assert_eq!(comparison.lines().count(), 294);
    assert_eq!(
        comparison.lines().next().unwrap(),
        "date,actual,hybrid,sarima_only,lstm_only"
    );

    let out = forecast(dir.path(), &["evaluate", "--config", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("hybrid"));
    let metrics = std::fs::read_to_string(cfg.paths.output_dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 4);
    for f in ["cumulative_error.csv", "error_histogram.csv", "metrics.txt", "plots.gp", "run_config.json"] {
        assert!(cfg.paths.output_dir.join(f).exists(), "{f}");
    }

    let out = forecast(dir.path(), &["forecast", "--config", &path, "--override", "horizon=10"]);
    assert!(out.status.success());
    let comparison = std::fs::read_to_string(cfg.paths.output_dir.join("forecast_comparison.csv")).unwrap();
    assert_eq!(comparison.lines().count(), 11);
}
