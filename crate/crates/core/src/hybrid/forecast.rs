use std::collections::VecDeque;
use std::path::Path;

use chrono::{Days, NaiveDate};

use super::climatology::Climatology;
use super::decay::decay_law;
use super::model::HybridModel;
use crate::error::{Error, Result};
use crate::features::{encode_row, physical_rows, Scaler, FEATURE_COUNT};
use crate::ingest::DailySeries;
use crate::lstm::WindowPredictor;

/// The last fully observed days before the forecast starts, as
/// preprocessed physical rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedWindow {
    pub end_date: NaiveDate,
    pub rows: Vec<Vec<f64>>,
}

impl SeedWindow {
    /// The `window` days ending just before row `end` of a preprocessed
    /// series.
    pub fn from_series(series: &DailySeries, end: usize, window: usize) -> Result<Self> {
        if window == 0 || end < window || end > series.len() {
            return Err(Error::InvalidInput(format!(
                "cannot take a {window}-day seed window ending at row {end} of {}",
                series.len()
            )));
        }
        let slice = series.slice(end - window, end)?;
        Ok(Self {
            end_date: series.date(end - 1),
            rows: physical_rows(&slice)?,
        })
    }

    fn start_date(&self) -> NaiveDate {
        self.end_date - Days::new(self.rows.len() as u64 - 1)
    }
}

/// One forecast day.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRecord {
    pub date: NaiveDate,
    pub sarima_baseline: f64,
    pub raw_residual_pred: f64,
    pub applied_correction: f64,
    pub hybrid_forecast: f64,
    pub sarima_only: f64,
    pub lstm_only: Option<f64>,
    pub actual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForecastReport {
    pub records: Vec<ForecastRecord>,
}

pub const REPORT_HEADER: [&str; 8] = [
    "date",
    "sarima_baseline",
    "raw_residual_pred",
    "applied_correction",
    "hybrid_forecast",
    "sarima_only",
    "lstm_only",
    "actual",
];

impl ForecastReport {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn hybrid(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.hybrid_forecast).collect()
    }

    pub fn baseline(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sarima_baseline).collect()
    }

    pub fn corrections(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.applied_correction).collect()
    }

    /// Attaches observed values; `actuals` must cover the whole horizon.
    pub fn with_actuals(mut self, actuals: &[f64]) -> Result<Self> {
        if actuals.len() != self.len() {
            return Err(Error::DimensionMismatch {
                context: "actuals over forecast horizon",
                expected: self.len(),
                actual: actuals.len(),
            });
        }
        for (r, &a) in self.records.iter_mut().zip(actuals) {
            r.actual = Some(a);
        }
        Ok(self)
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |e: csv::Error| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(REPORT_HEADER).map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.date.to_string(),
                r.sarima_baseline.to_string(),
                r.raw_residual_pred.to_string(),
                r.applied_correction.to_string(),
                r.hybrid_forecast.to_string(),
                r.sarima_only.to_string(),
                opt(r.lstm_only),
                opt(r.actual),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Drives a window predictor forward for `horizon` days. `step` receives the
/// 1-based day and the raw prediction and returns the temperature written
/// into the rolling window for that day. Exogenous slots come from
/// climatology and Fourier terms from the calendar.
pub(crate) fn roll_forward(
    predictor: &dyn WindowPredictor,
    scaler: &Scaler,
    climatology: &Climatology,
    seed: &SeedWindow,
    horizon: usize,
    mut step: impl FnMut(usize, f64) -> Result<f64>,
) -> Result<()> {
    if seed.rows.len() != predictor.window() {
        return Err(Error::InvalidInput(format!(
            "seed window has {} days, the model expects {}",
            seed.rows.len(),
            predictor.window()
        )));
    }
    if predictor.features() != FEATURE_COUNT {
        return Err(Error::DimensionMismatch {
            context: "predictor feature count",
            expected: FEATURE_COUNT,
            actual: predictor.features(),
        });
    }
    if let Some(row) = seed.rows.iter().find(|r| r.len() != scaler.width()) {
        return Err(Error::DimensionMismatch {
            context: "seed window row",
            expected: scaler.width(),
            actual: row.len(),
        });
    }
    if seed.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("seed window contains non-finite values".into()));
    }
    let start = seed.start_date();
    let mut buffer: VecDeque<Vec<f64>> = seed
        .rows
        .iter()
        .enumerate()
        .map(|(i, p)| encode_row(scaler, p, start + Days::new(i as u64)))
        .collect();
    let mut flat = Vec::with_capacity(predictor.window() * FEATURE_COUNT);
    for t in 1..=horizon {
        flat.clear();
        buffer.iter().for_each(|r| flat.extend_from_slice(r));
        let raw = predictor.predict(&flat)?;
        if !raw.is_finite() {
            return Err(Error::Numerical(format!("prediction at day {t} is not finite")));
        }
        let temperature = step(t, raw)?;
        let date = seed.end_date + Days::new(t as u64);
        let mut physical = Vec::with_capacity(scaler.width());
        physical.push(temperature);
        physical.extend_from_slice(climatology.for_date(date));
        buffer.pop_front();
        buffer.push_back(encode_row(scaler, &physical, date));
    }
    Ok(())
}

/// Standalone SARIMA forecast.
pub fn forecast_sarima_only(model: &HybridModel, horizon: usize) -> Result<Vec<f64>> {
    model.sarima.forecast(horizon)
}

/// Fully recursive temperature-target LSTM forecast.
pub fn forecast_lstm_only(
    network: &dyn WindowPredictor,
    model: &HybridModel,
    horizon: usize,
    seed: &SeedWindow,
) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1 day".into()));
    }
    let mut out = Vec::with_capacity(horizon);
    roll_forward(network, &model.feature_scaler, &model.climatology, seed, horizon, |_, raw| {
        let t = model.feature_scaler.inverse_value(0, raw);
        out.push(t);
        Ok(t)
    })?;
    Ok(out)
}

/// Recursive hybrid forecast using the model's own residual network.
pub fn recursive_forecast(model: &HybridModel, horizon: usize, seed: &SeedWindow) -> Result<ForecastReport> {
    recursive_forecast_with(&model.residual_lstm, model, horizon, seed)
}

/// Recursive hybrid forecast with an arbitrary residual predictor.
///
/// The SARIMA baseline is one `horizon`-step forecast. Each day the
/// predictor's scaled residual is inverse-scaled, damped by the decay law
/// and added to the baseline; the hybrid value then fills that day's
/// temperature slot in the rolling window.
pub fn recursive_forecast_with(
    residual_predictor: &dyn WindowPredictor,
    model: &HybridModel,
    horizon: usize,
    seed: &SeedWindow,
) -> Result<ForecastReport> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1 day".into()));
    }
    if seed.end_date != model.training_end {
        log::warn!(
            "seed window ends {} but the model was trained through {}",
            seed.end_date,
            model.training_end
        );
    }
    let law = decay_law(&model.decay_law)?;
    let baseline = model.sarima.forecast(horizon)?;
    let mut records = Vec::with_capacity(horizon);
    roll_forward(
        residual_predictor,
        &model.feature_scaler,
        &model.climatology,
        seed,
        horizon,
        |t, raw| {
            let residual = model.residual_scaler.inverse_value(0, raw);
            let correction = law.correction(residual, t, model.direct_days, model.decay);
            let base = baseline[t - 1];
            let hybrid = base + correction;
            records.push(ForecastRecord {
                date: seed.end_date + Days::new(t as u64),
                sarima_baseline: base,
                raw_residual_pred: residual,
                applied_correction: correction,
                hybrid_forecast: hybrid,
                sarima_only: base,
                lstm_only: None,
                actual: None,
            });
            Ok(hybrid)
        },
    )?;

    if let Some(net) = &model.temperature_lstm {
        let lstm = forecast_lstm_only(net, model, horizon, seed)?;
        for (r, v) in records.iter_mut().zip(lstm) {
            r.lstm_only = Some(v);
        }
    }
    Ok(ForecastReport { records })
}
