//! The four pipeline commands behind the `forecast` binary.

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::eval::{comparison_report, Comparison, MetricSummary, COMPARISON_CSV};
use crate::hybrid::{
    recursive_forecast, train_hybrid, ForecastReport, ForecasterRegistry, HybridModel, SeedWindow, TrainingLog,
};
use crate::ingest::{
    cache_file_name, difference_pressure, fetch_cached, fill_gaps, load_csv, DailySeries, OpenMeteoClient, Variable,
};

/// Effective configuration echoed into every output directory.
pub const CONFIG_ECHO: &str = "run_config.json";
pub const TRAINING_LOG: &str = "training_log.txt";
pub const BASELINE_TRAINING_LOG: &str = "baseline_training_log.txt";
pub const REPORT_CSV: &str = "forecast_report.csv";

/// Path of the raw CSV for the configured location and date range.
pub fn raw_data_path(config: &RunConfig) -> PathBuf {
    config.paths.data_cache.join(cache_file_name(
        config.location.latitude,
        config.location.longitude,
        config.start_date,
        config.end_date,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FetchSummary {
    pub path: PathBuf,
    pub rows: usize,
    pub missing_cells: usize,
}

pub fn cmd_fetch(config: &RunConfig, client: &OpenMeteoClient) -> Result<FetchSummary> {
    let (series, path) = fetch_cached(
        client,
        &config.paths.data_cache,
        config.location.latitude,
        config.location.longitude,
        config.start_date,
        config.end_date,
    )?;
    let missing_cells = Variable::ALL
        .iter()
        .map(|&v| series.column(v).iter().filter(|x| x.is_none()).count())
        .sum();
    Ok(FetchSummary {
        path,
        rows: series.len(),
        missing_cells,
    })
}

/// Cached raw series for the config.
pub fn load_raw(config: &RunConfig) -> Result<DailySeries> {
    let path = raw_data_path(config);
    if !path.exists() {
        return Err(Error::MissingArtifact(path));
    }
    let series = load_csv(&path)?;
    if series.start_date() != config.start_date || series.end_date() != Some(config.end_date) {
        return Err(Error::InvalidInput(format!(
            "{} covers {}..{:?}, config asks for {}..{}",
            path.display(),
            series.start_date(),
            series.end_date(),
            config.start_date,
            config.end_date
        )));
    }
    Ok(series)
}

/// Gap-filled, pressure-differenced series.
pub fn load_prepared(config: &RunConfig) -> Result<DailySeries> {
    let raw = load_raw(config)?;
    let filled = fill_gaps(&raw).map_err(|e| e.in_stage("gap filling"))?;
    difference_pressure(&filled).map_err(|e| e.in_stage("pressure differencing"))
}

fn echo_config(config: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(CONFIG_ECHO);
    std::fs::write(&path, config.to_json()? + "\n").map_err(|e| Error::io(&path, e))
}

/// One `epoch N loss L` line per epoch after the header lines.
pub fn render_training_log(sarima_loglik: f64, window_count: usize, history: &[f64]) -> String {
    let mut out = format!("sarima_loglik {sarima_loglik}\ntraining_windows {window_count}\n");
    for (i, loss) in history.iter().enumerate() {
        out.push_str(&format!("epoch {} loss {loss}\n", i + 1));
    }
    out
}

/// Trains on the cached data and writes the model bundle, training logs
/// and config echo into the model directory.
pub fn cmd_train(config: &RunConfig) -> Result<(HybridModel, TrainingLog)> {
    let series = load_prepared(config)?;
    let (model, log) = train_hybrid(&series, &config.hybrid_config())?;
    let dir = &config.paths.model_dir;
    model.save(dir)?;
    echo_config(config, dir)?;
    let path = dir.join(TRAINING_LOG);
    std::fs::write(
        &path,
        render_training_log(log.sarima_loglik, log.window_count, &log.residual_history),
    )
    .map_err(|e| Error::io(&path, e))?;
    if let Some(history) = &log.baseline_history {
        let path = dir.join(BASELINE_TRAINING_LOG);
        std::fs::write(&path, render_training_log(log.sarima_loglik, log.window_count, history))
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok((model, log))
}

/// Forecast plus the comparison table handed to `cmd_evaluate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastOutput {
    pub report: ForecastReport,
    pub comparison: Comparison,
}

/// Runs every configured forecaster from the end of the training split and
/// writes `forecast_report.csv` and `forecast_comparison.csv`. Days past
/// the end of the data get no actual value.
pub fn cmd_forecast(config: &RunConfig) -> Result<ForecastOutput> {
    let model = HybridModel::load(&config.paths.model_dir)?;
    let series = load_prepared(config)?;
    if config.test_days >= series.len() {
        return Err(Error::InsufficientData(format!(
            "test_days {} leaves no training data in {} days",
            config.test_days,
            series.len()
        )));
    }
    let train_len = series.len() - config.test_days;
    if series.date(train_len - 1) != model.training_end {
        return Err(Error::InvalidInput(format!(
            "model was trained through {} but the configured split ends {}; retrain",
            model.training_end,
            series.date(train_len - 1)
        )));
    }
    let seed = SeedWindow::from_series(&series, train_len, model.window)?;
    let horizon = config.horizon();

    let temperature = series.values(Variable::Temperature)?;
    let actuals: Vec<f64> = (0..horizon)
        .map(|t| temperature.get(train_len + t).copied().unwrap_or(f64::NAN))
        .collect();
    let observed = actuals.iter().take_while(|a| !a.is_nan()).count();
    if observed < horizon {
        log::warn!("observations cover {observed} of {horizon} forecast days");
    }

    let mut report = recursive_forecast(&model, horizon, &seed).map_err(|e| e.in_stage("forecast"))?;
    for (r, &a) in report.records.iter_mut().zip(&actuals) {
        r.actual = (!a.is_nan()).then_some(a);
    }

    let registry = ForecasterRegistry::default();
    let mut models = Vec::with_capacity(config.models.len());
    for name in &config.models {
        let path = registry.get(name)?.forecast(&model, &seed, horizon)?;
        models.push((name.clone(), path));
    }
    let comparison = Comparison {
        dates: report.records.iter().map(|r| r.date).collect(),
        actual: actuals,
        models,
    };

    let dir = &config.paths.output_dir;
    echo_config(config, dir)?;
    report.to_csv(&dir.join(REPORT_CSV))?;
    comparison.to_csv(&dir.join(COMPARISON_CSV))?;
    Ok(ForecastOutput { report, comparison })
}

/// Scores `forecast_comparison.csv` and writes metrics, curves, histogram
/// and plot script next to it.
pub fn cmd_evaluate(config: &RunConfig) -> Result<Vec<MetricSummary>> {
    let dir = &config.paths.output_dir;
    let comparison = Comparison::from_csv(&dir.join(COMPARISON_CSV))?;
    let summaries = comparison_report(&comparison, dir, config.histogram_bin_width)?;
    echo_config(config, dir)?;
    Ok(summaries)
}
