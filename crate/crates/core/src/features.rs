//! Model inputs: Fourier day-of-year encoding, MinMax scaling fitted on the
//! training split, chronological splitting and sliding windows.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{DailySeries, Variable};

/// Length of the encoded annual cycle, in days.
pub const FOURIER_PERIOD_DAYS: f64 = 365.25;

/// Number of physical (scaled) feature columns.
pub const PHYSICAL_FEATURES: usize = 5;
/// Total columns per row: five physical variables plus sine and cosine.
pub const FEATURE_COUNT: usize = PHYSICAL_FEATURES + 2;

pub const TEMPERATURE_COL: usize = 0;
pub const FOURIER_SIN_COL: usize = 5;
pub const FOURIER_COS_COL: usize = 6;

/// `(sin, cos)` of the zero-based day-of-year angle.
pub fn fourier_encode(day_index: f64) -> (f64, f64) {
    let angle = std::f64::consts::TAU * day_index / FOURIER_PERIOD_DAYS;
    angle.sin_cos()
}

/// Fourier terms for a calendar date.
pub fn fourier_for_date(date: NaiveDate) -> (f64, f64) {
    fourier_encode(date.ordinal0() as f64)
}

/// Per-column MinMax scaler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    /// Fits on training rows only.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InsufficientData("cannot fit a scaler on zero rows".into()))?;
        let width = first.len();
        let mut min = first.clone();
        let mut max = first.clone();
        for row in rows {
            check_width(row.len(), width)?;
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::InvalidInput(format!("non-finite value in column {j}")));
                }
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Ok(Self { min, max })
    }

    /// Scaler for a single series of values.
    pub fn fit_column(values: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Self::fit(&rows)
    }

    pub fn width(&self) -> usize {
        self.min.len()
    }

    pub fn transform_value(&self, col: usize, x: f64) -> f64 {
        let range = self.max[col] - self.min[col];
        if range == 0.0 {
            0.5
        } else {
            (x - self.min[col]) / range
        }
    }

    /// Inverse of [`Scaler::transform_value`]. Constant columns map back to
    /// their single observed value.
    pub fn inverse_value(&self, col: usize, z: f64) -> f64 {
        let range = self.max[col] - self.min[col];
        if range == 0.0 {
            self.min[col]
        } else {
            self.min[col] + z * range
        }
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter()
            .map(|row| {
                check_width(row.len(), self.width())?;
                Ok(row
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| self.transform_value(j, x))
                    .collect())
            })
            .collect()
    }

    pub fn inverse_transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter()
            .map(|row| {
                check_width(row.len(), self.width())?;
                Ok(row
                    .iter()
                    .enumerate()
                    .map(|(j, &z)| self.inverse_value(j, z))
                    .collect())
            })
            .collect()
    }
}

fn check_width(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::DimensionMismatch {
            context: "scaler column count",
            expected,
            actual,
        });
    }
    Ok(())
}

/// Splits off the last `test_days` rows without shuffling.
pub fn chronological_split<T>(rows: &[T], test_days: usize) -> Result<(&[T], &[T])> {
    if test_days >= rows.len() {
        return Err(Error::InvalidInput(format!(
            "test_days ({test_days}) must be smaller than the number of rows ({})",
            rows.len()
        )));
    }
    Ok(rows.split_at(rows.len() - test_days))
}

/// Physical feature row for day `i`: temperature, dew point, pressure,
/// wind speed, visibility.
pub fn physical_rows(series: &DailySeries) -> Result<Vec<Vec<f64>>> {
    let cols = Variable::ALL
        .iter()
        .map(|&v| series.values(v))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..series.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect())
}

/// Scales a physical row and appends the Fourier terms for `date`.
pub fn encode_row(scaler: &Scaler, physical: &[f64], date: NaiveDate) -> Vec<f64> {
    let mut row: Vec<f64> = physical
        .iter()
        .enumerate()
        .map(|(j, &x)| scaler.transform_value(j, x))
        .collect();
    let (s, c) = fourier_for_date(date);
    row.push(s);
    row.push(c);
    row
}

/// Scaled, Fourier-augmented rows for a preprocessed series.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledFeatureMatrix {
    pub start_date: NaiveDate,
    pub rows: Vec<Vec<f64>>,
    pub scaler: Scaler,
    /// Index of the first test row.
    pub split_index: usize,
}

impl ScaledFeatureMatrix {
    /// Fits the scaler on all but the last `test_days` rows and encodes every
    /// row. The series must already be gap-filled and pressure-differenced.
    pub fn build(series: &DailySeries, test_days: usize) -> Result<Self> {
        let physical = physical_rows(series)?;
        let (train, _) = chronological_split(&physical, test_days)?;
        if train.len() < 2 {
            return Err(Error::InsufficientData(
                "the training split needs at least 2 rows".into(),
            ));
        }
        let scaler = Scaler::fit(train)?;
        let rows = physical
            .iter()
            .enumerate()
            .map(|(i, p)| encode_row(&scaler, p, series.date(i)))
            .collect();
        Ok(Self {
            start_date: series.start_date(),
            rows,
            scaler,
            split_index: physical.len() - test_days,
        })
    }

    pub fn train_rows(&self) -> &[Vec<f64>] {
        &self.rows[..self.split_index]
    }

    pub fn test_rows(&self) -> &[Vec<f64>] {
        &self.rows[self.split_index..]
    }
}

/// Supervised samples: each input is `window × features` values, flattened
/// row-major (one day after another).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowBatch {
    pub window: usize,
    pub features: usize,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl WindowBatch {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// A batch restricted to the given sample indices.
    pub fn select(&self, indices: &[usize]) -> WindowBatch {
        WindowBatch {
            window: self.window,
            features: self.features,
            inputs: indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
        }
    }
}

/// Sample `k` pairs rows `k..k+window` with `targets[k + window]`.
pub fn build_windows(rows: &[Vec<f64>], targets: &[f64], window: usize) -> Result<WindowBatch> {
    if window == 0 {
        return Err(Error::InvalidInput("window must be at least 1 day".into()));
    }
    if targets.len() != rows.len() {
        return Err(Error::DimensionMismatch {
            context: "window targets",
            expected: rows.len(),
            actual: targets.len(),
        });
    }
    if rows.len() < window + 1 {
        return Err(Error::InsufficientData(format!(
            "{} rows cannot form a {window}-day window with a target",
            rows.len()
        )));
    }
    let features = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != features) {
        return Err(Error::DimensionMismatch {
            context: "window feature count",
            expected: features,
            actual: bad.len(),
        });
    }
    let count = rows.len() - window;
    let inputs = (0..count)
        .map(|k| rows[k..k + window].concat())
        .collect();
    Ok(WindowBatch {
        window,
        features,
        inputs,
        targets: targets[window..].to_vec(),
    })
}
