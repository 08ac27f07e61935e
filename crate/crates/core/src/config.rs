//! Run configuration: one JSON document plus `key=value` overrides.
//!
//! Defaults marked "published" are the values stated for the original NYC
//! study; the rest are choices of this implementation.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hybrid::{ForecasterRegistry, HybridConfig, HYBRID, LSTM_ONLY, SARIMA_ONLY};
use crate::lstm::TrainConfig;
use crate::sarima::SarimaSpec;

/// Overrides `paths.data_cache` when set.
pub const CACHE_DIR_ENV: &str = "FORECAST_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Location {
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarimaOrders {
    /// (p, d, q); published (1, 1, 1).
    pub order: [usize; 3],
    /// (P, D, Q, s); published (1, 1, 1, 12).
    pub seasonal_order: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LstmSettings {
    /// Published [64, 32].
    pub units: Vec<usize>,
    /// Published 0.001.
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub clip_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySettings {
    /// Published 5.
    pub direct_days: usize,
    /// Published 0.92.
    pub factor: f64,
    /// `geometric` or `flat`.
    pub law: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub data_cache: PathBuf,
    pub model_dir: PathBuf,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub location: Location,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    /// Published 293.
    pub test_days: usize,
    /// Published 14.
    pub window: usize,
    /// Forecast length; defaults to `test_days`.
    #[serde(default)]
    pub horizon: Option<usize>,
    pub sarima: SarimaOrders,
    pub lstm: LstmSettings,
    pub decay: DecaySettings,
    pub models: Vec<String>,
    pub histogram_bin_width: f64,
    pub paths: Paths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            location: Location {
                latitude: 40.71,
                longitude: -74.01,
            },
            start_date: NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date"),
            end_date: NaiveDate::from_ymd_opt(2023, 12, 31).expect("valid date"),
            test_days: 293,
            window: 14,
            horizon: None,
            sarima: SarimaOrders {
                order: [1, 1, 1],
                seasonal_order: [1, 1, 1, 12],
            },
            lstm: LstmSettings {
                units: vec![64, 32],
                learning_rate: 0.001,
                epochs: 100,
                batch_size: 32,
                seed: 42,
                clip_norm: None,
            },
            decay: DecaySettings {
                direct_days: 5,
                factor: 0.92,
                law: "geometric".into(),
            },
            models: vec![HYBRID.into(), SARIMA_ONLY.into(), LSTM_ONLY.into()],
            histogram_bin_width: 1.0,
            paths: Paths {
                data_cache: PathBuf::from("data/cache"),
                model_dir: PathBuf::from("artifacts/model"),
                output_dir: PathBuf::from("artifacts/output"),
            },
        }
    }
}

/// Settings that reproduce published values, as `(dotted key, JSON value)`.
pub const PUBLISHED_DEFAULTS: &[(&str, &str)] = &[
    ("test_days", "293"),
    ("window", "14"),
    ("sarima.order", "[1,1,1]"),
    ("sarima.seasonal_order", "[1,1,1,12]"),
    ("lstm.units", "[64,32]"),
    ("lstm.learning_rate", "0.001"),
    ("decay.direct_days", "5"),
    ("decay.factor", "0.92"),
];

impl RunConfig {
    /// Reads a config file; missing keys are an error, so every run
    /// records every setting.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_value(value)
    }

    /// Defaults, then `path` if given, then overrides, then the cache
    /// environment variable.
    pub fn resolve(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?
            }
            None => serde_json::to_value(RunConfig::default())?,
        };
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        let mut config = Self::from_value(value)?;
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            config.paths.data_cache = PathBuf::from(dir);
        }
        Ok(config)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_value(value).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.location.latitude) {
            return Err(Error::InvalidInput(format!(
                "location.latitude must be within [-90, 90], got {}",
                self.location.latitude
            )));
        }
        if !(-180.0..=180.0).contains(&self.location.longitude) {
            return Err(Error::InvalidInput(format!(
                "location.longitude must be within [-180, 180], got {}",
                self.location.longitude
            )));
        }
        if self.start_date > self.end_date {
            return Err(Error::InvalidInput("start_date is after end_date".into()));
        }
        if self.horizon == Some(0) {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        if self.histogram_bin_width.is_nan() || self.histogram_bin_width <= 0.0 {
            return Err(Error::InvalidInput("histogram_bin_width must be positive".into()));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidInput("models must name at least one forecaster".into()));
        }
        let registry = ForecasterRegistry::default();
        for name in &self.models {
            registry.get(name)?;
        }
        self.hybrid_config().validate()
    }

    pub fn horizon(&self) -> usize {
        self.horizon.unwrap_or(self.test_days)
    }

    pub fn sarima_spec(&self) -> SarimaSpec {
        let [p, d, q] = self.sarima.order;
        let [sp, sd, sq, s] = self.sarima.seasonal_order;
        SarimaSpec {
            p,
            d,
            q,
            seasonal_p: sp,
            seasonal_d: sd,
            seasonal_q: sq,
            period: s,
        }
    }

    pub fn hybrid_config(&self) -> HybridConfig {
        HybridConfig {
            sarima: self.sarima_spec(),
            test_days: self.test_days,
            window: self.window,
            units: self.lstm.units.clone(),
            train: TrainConfig {
                learning_rate: self.lstm.learning_rate,
                epochs: self.lstm.epochs,
                batch_size: self.lstm.batch_size,
                seed: self.lstm.seed,
                clip_norm: self.lstm.clip_norm,
            },
            direct_days: self.decay.direct_days,
            decay: self.decay.factor,
            decay_law: self.decay.law.clone(),
            train_lstm_baseline: self.models.iter().any(|m| m == LSTM_ONLY),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Applies `a.b.c=value`; the value is parsed as JSON, falling back to a
/// plain string.
pub fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::InvalidInput(format!("override `{item}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::InvalidInput(format!("override key `{key}`: `{part}` has no parent object")))?;
        if i + 1 == parts.len() {
            if !obj.contains_key(*part) {
                return Err(Error::InvalidInput(format!("override key `{key}` is not a config field")));
            }
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .get_mut(*part)
            .ok_or_else(|| Error::InvalidInput(format!("override key `{key}` is not a config field")))?;
    }
    Ok(())
}
