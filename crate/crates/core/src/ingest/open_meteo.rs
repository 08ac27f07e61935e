use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{Days, NaiveDate};
use serde_json::Value;

use super::csv_io::{load_csv, write_csv};
use super::series::{inclusive_days, DailySeries, Variable};
use crate::error::{Error, Result};

pub const ARCHIVE_URL: &str = "https://archive-api.open-meteo.com/v1/archive";

/// Blocking client for the Open-Meteo historical archive.
#[derive(Debug, Clone)]
pub struct OpenMeteoClient {
    base_url: String,
    timeout: Duration,
}

impl Default for OpenMeteoClient {
    fn default() -> Self {
        Self::new(ARCHIVE_URL)
    }
}

impl OpenMeteoClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Daily means for all five variables over `[start, end]`.
    pub fn fetch(
        &self,
        latitude: f64,
        longitude: f64,
        start: NaiveDate,
        end: NaiveDate,
    ) -> Result<DailySeries> {
        validate_request(latitude, longitude, start, end)?;
        let daily = Variable::ALL.map(Variable::api_name).join(",");
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        let response = client
            .get(&self.base_url)
            .query(&[
                ("latitude", latitude.to_string()),
                ("longitude", longitude.to_string()),
                ("start_date", start.to_string()),
                ("end_date", end.to_string()),
                ("daily", daily),
                ("timezone", "auto".to_string()),
                ("wind_speed_unit", "kmh".to_string()),
            ])
            .send()
            .map_err(|e| Error::Transport(e.to_string()))?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| Error::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(Error::Request {
                status: status.as_u16(),
                body,
            });
        }
        parse_archive_response(&body, start, end)
    }
}

fn validate_request(latitude: f64, longitude: f64, start: NaiveDate, end: NaiveDate) -> Result<()> {
    if !(latitude.is_finite() && latitude.abs() <= 90.0) {
        return Err(Error::InvalidInput(format!(
            "latitude must be within [-90, 90], got {latitude}"
        )));
    }
    if !(longitude.is_finite() && longitude.abs() <= 180.0) {
        return Err(Error::InvalidInput(format!(
            "longitude must be within [-180, 180], got {longitude}"
        )));
    }
    if start > end {
        return Err(Error::InvalidInput(format!(
            "start date {start} is after end date {end}"
        )));
    }
    Ok(())
}

/// Fetches from the default archive endpoint.
pub fn fetch_open_meteo(
    latitude: f64,
    longitude: f64,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<DailySeries> {
    OpenMeteoClient::default().fetch(latitude, longitude, start, end)
}

/// Converts an archive JSON body into a series covering exactly `[start, end]`.
///
/// `null` readings become missing values. Visibility arrives in metres and
/// is stored in kilometres.
pub fn parse_archive_response(body: &str, start: NaiveDate, end: NaiveDate) -> Result<DailySeries> {
    let root: Value = serde_json::from_str(body).map_err(|e| Error::Parse {
        field: "<body>".into(),
        message: e.to_string(),
    })?;
    let daily = root.get("daily").ok_or_else(|| Error::Parse {
        field: "daily".into(),
        message: "missing".into(),
    })?;
    let expected = inclusive_days(start, end);

    let time = array_field(daily, "time")?;
    if time.len() != expected {
        return Err(Error::Parse {
            field: "time".into(),
            message: format!("expected {expected} days, got {}", time.len()),
        });
    }
    for (i, t) in time.iter().enumerate() {
        let want = start + Days::new(i as u64);
        let got = t.as_str().and_then(|s| s.parse::<NaiveDate>().ok());
        if got != Some(want) {
            return Err(Error::Parse {
                field: "time".into(),
                message: format!("entry {i} is {t}, expected {want}"),
            });
        }
    }

    let mut columns: [Vec<Option<f64>>; 5] = Default::default();
    for var in Variable::ALL {
        let name = var.api_name();
        let values = array_field(daily, name)?;
        if values.len() != expected {
            return Err(Error::Parse {
                field: name.into(),
                message: format!("expected {expected} values, got {}", values.len()),
            });
        }
        let scale = if var == Variable::Visibility { 1e-3 } else { 1.0 };
        columns[var.index()] = values
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::Null => Ok(None),
                other => other.as_f64().map(|x| Some(x * scale)).ok_or_else(|| Error::Parse {
                    field: name.into(),
                    message: format!("entry {i} is not a number: {other}"),
                }),
            })
            .collect::<Result<_>>()?;
    }
    DailySeries::new(start, columns)
}

fn array_field<'a>(daily: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    daily
        .get(name)
        .ok_or_else(|| Error::Parse {
            field: name.into(),
            message: "missing from response".into(),
        })?
        .as_array()
        .ok_or_else(|| Error::Parse {
            field: name.into(),
            message: "not an array".into(),
        })
}

/// Cache file name for one request.
pub fn cache_file_name(latitude: f64, longitude: f64, start: NaiveDate, end: NaiveDate) -> String {
    format!("open_meteo_{latitude:.4}_{longitude:.4}_{start}_{end}.csv")
}

/// Loads the request from `cache_dir` if present, otherwise fetches it with
/// `client` and writes the cache. Returns the series and the cache path.
pub fn fetch_cached(
    client: &OpenMeteoClient,
    cache_dir: &Path,
    latitude: f64,
    longitude: f64,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<(DailySeries, PathBuf)> {
    validate_request(latitude, longitude, start, end)?;
    let path = cache_dir.join(cache_file_name(latitude, longitude, start, end));
    if path.exists() {
        log::info!("cache hit: {}", path.display());
        return Ok((load_csv(&path)?, path));
    }
    let series = client.fetch(latitude, longitude, start, end)?;
    std::fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    write_csv(&series, &path)?;
    Ok((series, path))
}
