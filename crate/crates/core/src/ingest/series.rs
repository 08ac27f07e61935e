use std::fmt;

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};

/// The five observed weather variables, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    Temperature,
    DewPoint,
    Pressure,
    WindSpeed,
    Visibility,
}

impl Variable {
    pub const ALL: [Variable; 5] = [
        Variable::Temperature,
        Variable::DewPoint,
        Variable::Pressure,
        Variable::WindSpeed,
        Variable::Visibility,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name in the CSV schema.
    pub fn csv_column(self) -> &'static str {
        match self {
            Variable::Temperature => "temperature_c",
            Variable::DewPoint => "dew_point_c",
            Variable::Pressure => "pressure_hpa",
            Variable::WindSpeed => "wind_speed_kmh",
            Variable::Visibility => "visibility_km",
        }
    }

    /// Daily aggregate requested from the Open-Meteo archive.
    pub fn api_name(self) -> &'static str {
        match self {
            Variable::Temperature => "temperature_2m_mean",
            Variable::DewPoint => "dew_point_2m_mean",
            Variable::Pressure => "pressure_msl_mean",
            Variable::WindSpeed => "wind_speed_10m_mean",
            Variable::Visibility => "visibility_mean",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Variable::Temperature => "temperature",
            Variable::DewPoint => "dew_point",
            Variable::Pressure => "pressure",
            Variable::WindSpeed => "wind_speed",
            Variable::Visibility => "visibility",
        };
        f.write_str(name)
    }
}

/// Date-indexed daily observations. `None` marks a missing reading.
///
/// Dates are implicit: row `i` is `start_date + i` days, so the series can
/// never hold duplicated or skipped dates.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    start_date: NaiveDate,
    columns: [Vec<Option<f64>>; 5],
}

impl DailySeries {
    /// Builds a series from per-variable columns in [`Variable::ALL`] order.
    pub fn new(start_date: NaiveDate, columns: [Vec<Option<f64>>; 5]) -> Result<Self> {
        let len = columns[0].len();
        if let Some((var, col)) = Variable::ALL
            .iter()
            .zip(columns.iter())
            .find(|(_, c)| c.len() != len)
        {
            return Err(Error::InvalidInput(format!(
                "column {var} has {} rows, expected {len}",
                col.len()
            )));
        }
        if len > 0 && start_date.checked_add_days(Days::new(len as u64 - 1)).is_none() {
            return Err(Error::InvalidInput("date range overflows the calendar".into()));
        }
        Ok(Self { start_date, columns })
    }

    /// Convenience constructor for gap-free data.
    pub fn from_values(start_date: NaiveDate, columns: [Vec<f64>; 5]) -> Result<Self> {
        Self::new(start_date, columns.map(|c| c.into_iter().map(Some).collect()))
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    /// Last date, or `None` for an empty series.
    pub fn end_date(&self) -> Option<NaiveDate> {
        self.len()
            .checked_sub(1)
            .map(|n| self.start_date + Days::new(n as u64))
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn date(&self, index: usize) -> NaiveDate {
        self.start_date + Days::new(index as u64)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.len()).map(|i| self.date(i))
    }

    pub fn column(&self, var: Variable) -> &[Option<f64>] {
        &self.columns[var.index()]
    }

    pub(crate) fn column_mut(&mut self, var: Variable) -> &mut Vec<Option<f64>> {
        &mut self.columns[var.index()]
    }

    /// Dense values of a column; fails if any reading is missing.
    pub fn values(&self, var: Variable) -> Result<Vec<f64>> {
        self.column(var)
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidInput(format!("{var} is missing on {}", self.date(i)))
                })
            })
            .collect()
    }

    pub fn has_missing(&self) -> bool {
        self.columns.iter().flatten().any(Option::is_none)
    }

    /// Rows `[from, to)` as a new series.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from > to || to > self.len() {
            return Err(Error::InvalidInput(format!(
                "slice {from}..{to} out of range for {} rows",
                self.len()
            )));
        }
        Self::new(
            self.date(from),
            self.columns.clone().map(|c| c[from..to].to_vec()),
        )
    }
}

/// Number of days in `[start, end]`, inclusive.
pub(crate) fn inclusive_days(start: NaiveDate, end: NaiveDate) -> usize {
    (end - start).num_days() as usize + 1
}
