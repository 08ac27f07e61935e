//! Forecasting strategies selectable by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::forecast::{forecast_lstm_only, forecast_sarima_only, recursive_forecast, SeedWindow};
use super::model::HybridModel;
use crate::error::{Error, Result};

pub const HYBRID: &str = "hybrid";
pub const SARIMA_ONLY: &str = "sarima_only";
pub const LSTM_ONLY: &str = "lstm_only";

/// A model variant that produces a temperature path from a trained bundle.
pub trait Forecaster: Send + Sync {
    fn name(&self) -> &'static str;
    fn forecast(&self, model: &HybridModel, seed: &SeedWindow, horizon: usize) -> Result<Vec<f64>>;
}

pub struct HybridForecaster;

impl Forecaster for HybridForecaster {
    fn name(&self) -> &'static str {
        HYBRID
    }

    fn forecast(&self, model: &HybridModel, seed: &SeedWindow, horizon: usize) -> Result<Vec<f64>> {
        Ok(recursive_forecast(model, horizon, seed)?.hybrid())
    }
}

pub struct SarimaOnlyForecaster;

impl Forecaster for SarimaOnlyForecaster {
    fn name(&self) -> &'static str {
        SARIMA_ONLY
    }

    fn forecast(&self, model: &HybridModel, _seed: &SeedWindow, horizon: usize) -> Result<Vec<f64>> {
        forecast_sarima_only(model, horizon)
    }
}

pub struct LstmOnlyForecaster;

impl Forecaster for LstmOnlyForecaster {
    fn name(&self) -> &'static str {
        LSTM_ONLY
    }

    fn forecast(&self, model: &HybridModel, seed: &SeedWindow, horizon: usize) -> Result<Vec<f64>> {
        let net = model.temperature_lstm.as_ref().ok_or_else(|| {
            Error::InvalidInput("model bundle has no temperature LSTM for the lstm_only baseline".into())
        })?;
        forecast_lstm_only(net, model, horizon, seed)
    }
}

#[derive(Clone)]
pub struct ForecasterRegistry {
    entries: BTreeMap<&'static str, Arc<dyn Forecaster>>,
}

impl Default for ForecasterRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(HybridForecaster));
        registry.register(Arc::new(SarimaOnlyForecaster));
        registry.register(Arc::new(LstmOnlyForecaster));
        registry
    }
}

impl ForecasterRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, forecaster: Arc<dyn Forecaster>) {
        self.entries.insert(forecaster.name(), forecaster);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Forecaster>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownStrategy {
            kind: "forecaster",
            name: name.to_string(),
            known: self.names().join(", "),
        })
    }
}
