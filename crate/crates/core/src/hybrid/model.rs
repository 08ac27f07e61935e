use std::path::Path;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use super::climatology::Climatology;
use super::decay::decay_law;
use crate::error::{Error, Result};
use crate::features::{build_windows, chronological_split, encode_row, physical_rows, Scaler, TEMPERATURE_COL};
use crate::ingest::{DailySeries, Variable};
use crate::lstm::{train, LstmNetwork, TrainConfig};
use crate::sarima::{fit, SarimaModel, SarimaSpec};

/// Everything `train_hybrid` needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub sarima: SarimaSpec,
    pub test_days: usize,
    pub window: usize,
    pub units: Vec<usize>,
    pub train: TrainConfig,
    pub direct_days: usize,
    pub decay: f64,
    pub decay_law: String,
    /// Also train the temperature-target LSTM used as the standalone baseline.
    pub train_lstm_baseline: bool,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            sarima: SarimaSpec {
                p: 1,
                d: 1,
                q: 1,
                seasonal_p: 1,
                seasonal_d: 1,
                seasonal_q: 1,
                period: 12,
            },
            test_days: 293,
            window: 14,
            units: vec![64, 32],
            train: TrainConfig::default(),
            direct_days: 5,
            decay: 0.92,
            decay_law: "geometric".into(),
            train_lstm_baseline: true,
        }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        self.sarima.validate()?;
        self.train.validate()?;
        if self.window == 0 {
            return Err(Error::InvalidInput("window must be at least 1".into()));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "decay must lie in (0, 1], got {}",
                self.decay
            )));
        }
        decay_law(&self.decay_law)?;
        Ok(())
    }

    /// Seed for the standalone temperature LSTM, distinct from the residual
    /// network's.
    pub fn baseline_seed(&self) -> u64 {
        self.train.seed.wrapping_add(1)
    }
}

/// SARIMA baseline, residual LSTM and everything needed to run the
/// recursive forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub sarima: SarimaModel,
    pub residual_lstm: LstmNetwork,
    /// Temperature-target network for the LSTM-only comparison.
    pub temperature_lstm: Option<LstmNetwork>,
    pub feature_scaler: Scaler,
    pub residual_scaler: Scaler,
    pub climatology: Climatology,
    pub window: usize,
    pub direct_days: usize,
    pub decay: f64,
    pub decay_law: String,
    /// Last training day; forecasts start the day after.
    pub training_end: NaiveDate,
}

/// Loss histories and likelihood from a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    pub sarima_loglik: f64,
    pub window_count: usize,
    pub residual_history: Vec<f64>,
    pub baseline_history: Option<Vec<f64>>,
}

/// Training split of a preprocessed series.
pub fn training_split(series: &DailySeries, test_days: usize) -> Result<DailySeries> {
    let idx: Vec<usize> = (0..series.len()).collect();
    let (train, _) = chronological_split(&idx, test_days)?;
    series.slice(0, train.len())
}

/// Fits SARIMA on the training temperatures, trains the LSTM on the
/// resulting residuals and collects climatology. `series` must be
/// gap-filled and pressure-differenced; the last `test_days` rows are held
/// out.
pub fn train_hybrid(series: &DailySeries, config: &HybridConfig) -> Result<(HybridModel, TrainingLog)> {
    config.validate()?;
    let train_series = training_split(series, config.test_days).map_err(|e| e.in_stage("split"))?;
    let n = train_series.len();
    if n < config.window + 2 {
        return Err(Error::InsufficientData(format!(
            "{n} training days cannot support a {}-day window",
            config.window
        ))
        .in_stage("split"));
    }
    let physical = physical_rows(&train_series)?;
    let temperature = train_series.values(Variable::Temperature)?;

    let sarima = fit(config.sarima, &temperature).map_err(|e| e.in_stage("sarima fit"))?;
    log::info!("sarima fitted on {n} days, loglik {:.4}", sarima.loglik);
    let residuals = sarima
        .in_sample_residuals()
        .map_err(|e| e.in_stage("sarima residuals"))?;

    let feature_scaler = Scaler::fit(&physical).map_err(|e| e.in_stage("feature scaling"))?;
    let rows: Vec<Vec<f64>> = physical
        .iter()
        .enumerate()
        .map(|(i, p)| encode_row(&feature_scaler, p, train_series.date(i)))
        .collect();

    // Only residuals that serve as targets inform their scaler.
    let residual_scaler =
        Scaler::fit_column(&residuals[config.window..]).map_err(|e| e.in_stage("residual scaling"))?;
    let scaled_residuals: Vec<f64> = residuals
        .iter()
        .map(|&r| residual_scaler.transform_value(0, r))
        .collect();
    let windows = build_windows(&rows, &scaled_residuals, config.window)
        .map_err(|e| e.in_stage("windowing"))?;
    let features = rows[0].len();

    log::info!("training residual lstm on {} windows", windows.len());
    let mut residual_lstm = LstmNetwork::new(features, &config.units, config.window, config.train.seed)?;
    let residual_history =
        train(&mut residual_lstm, &windows, &config.train).map_err(|e| e.in_stage("residual lstm"))?;

    let (temperature_lstm, baseline_history) = if config.train_lstm_baseline {
        let targets: Vec<f64> = rows.iter().map(|r| r[TEMPERATURE_COL]).collect();
        let temp_windows = build_windows(&rows, &targets, config.window)?;
        log::info!("training temperature lstm baseline");
        let mut net = LstmNetwork::new(features, &config.units, config.window, config.baseline_seed())?;
        let mut cfg = config.train.clone();
        cfg.seed = config.baseline_seed();
        let history = train(&mut net, &temp_windows, &cfg).map_err(|e| e.in_stage("baseline lstm"))?;
        (Some(net), Some(history))
    } else {
        (None, None)
    };

    let exogenous: Vec<Vec<f64>> = physical.iter().map(|p| p[1..].to_vec()).collect();
    let climatology = Climatology::from_rows(train_series.start_date(), &exogenous)
        .map_err(|e| e.in_stage("climatology"))?;

    let log = TrainingLog {
        sarima_loglik: sarima.loglik,
        window_count: windows.len(),
        residual_history,
        baseline_history,
    };
    let model = HybridModel {
        sarima,
        residual_lstm,
        temperature_lstm,
        feature_scaler,
        residual_scaler,
        climatology,
        window: config.window,
        direct_days: config.direct_days,
        decay: config.decay,
        decay_law: config.decay_law.clone(),
        training_end: train_series.date(n - 1),
    };
    Ok((model, log))
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    window: usize,
    direct_days: usize,
    decay: f64,
    decay_law: String,
    training_end: NaiveDate,
    residual_seed: u64,
    baseline_seed: Option<u64>,
    files: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Scalers {
    features: Scaler,
    residual: Scaler,
}

const SARIMA_FILE: &str = "sarima.json";
const RESIDUAL_FILE: &str = "lstm_residual.json";
const BASELINE_FILE: &str = "lstm_temperature.json";
const SCALERS_FILE: &str = "scalers.json";
const CLIMATOLOGY_FILE: &str = "climatology.csv";
const MANIFEST_FILE: &str = "manifest.json";

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

impl HybridModel {
    /// First forecast date.
    pub fn forecast_start(&self) -> NaiveDate {
        self.training_end + Days::new(1)
    }

    /// Writes the bundle directory.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.sarima.save(&dir.join(SARIMA_FILE))?;
        self.residual_lstm.save(&dir.join(RESIDUAL_FILE))?;
        let mut files = vec![SARIMA_FILE, RESIDUAL_FILE, SCALERS_FILE, CLIMATOLOGY_FILE];
        if let Some(net) = &self.temperature_lstm {
            net.save(&dir.join(BASELINE_FILE))?;
            files.push(BASELINE_FILE);
        }
        let scalers = Scalers {
            features: self.feature_scaler.clone(),
            residual: self.residual_scaler.clone(),
        };
        write(&dir.join(SCALERS_FILE), serde_json::to_string_pretty(&scalers)?)?;
        self.climatology.to_csv(&dir.join(CLIMATOLOGY_FILE))?;
        let manifest = Manifest {
            format: "hybrid-bundle-v1".into(),
            window: self.window,
            direct_days: self.direct_days,
            decay: self.decay,
            decay_law: self.decay_law.clone(),
            training_end: self.training_end,
            residual_seed: self.residual_lstm.seed,
            baseline_seed: self.temperature_lstm.as_ref().map(|n| n.seed),
            files: files.iter().map(|s| s.to_string()).collect(),
        };
        write(&dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        let scalers_path = dir.join(SCALERS_FILE);
        let scalers: Scalers = serde_json::from_str(
            &std::fs::read_to_string(&scalers_path).map_err(|e| Error::io(&scalers_path, e))?,
        )?;
        let temperature_lstm = if manifest.files.iter().any(|f| f == BASELINE_FILE) {
            Some(LstmNetwork::load(&dir.join(BASELINE_FILE))?)
        } else {
            None
        };
        Ok(Self {
            sarima: SarimaModel::load(&dir.join(SARIMA_FILE))?,
            residual_lstm: LstmNetwork::load(&dir.join(RESIDUAL_FILE))?,
            temperature_lstm,
            feature_scaler: scalers.features,
            residual_scaler: scalers.residual,
            climatology: Climatology::from_csv(&dir.join(CLIMATOLOGY_FILE))?,
            window: manifest.window,
            direct_days: manifest.direct_days,
            decay: manifest.decay,
            decay_law: manifest.decay_law,
            training_end: manifest.training_end,
        })
    }
}
