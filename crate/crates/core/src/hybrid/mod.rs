//! Hybrid SARIMA + residual-LSTM model and its recursive forecaster.

mod climatology;
mod decay;
mod forecast;
mod model;
mod registry;

pub use climatology::{Climatology, DAY_SLOTS};
pub use decay::{decay_law, decayed_correction, DecayLaw, DecayRegistry, FlatDecay, GeometricDecay};
pub use forecast::{
    forecast_lstm_only, forecast_sarima_only, recursive_forecast, recursive_forecast_with,
    ForecastRecord, ForecastReport, SeedWindow, REPORT_HEADER,
};
pub use model::{train_hybrid, training_split, HybridConfig, HybridModel, TrainingLog};
pub use registry::{
    Forecaster, ForecasterRegistry, HybridForecaster, LstmOnlyForecaster, SarimaOnlyForecaster,
    HYBRID, LSTM_ONLY, SARIMA_ONLY,
};
