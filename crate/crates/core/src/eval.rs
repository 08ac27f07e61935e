//! Error metrics and the comparison tables behind the forecast plots.

use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hybrid::{ForecastReport, HYBRID, LSTM_ONLY, SARIMA_ONLY};

fn check_pair(pred: &[f64], actual: &[f64]) -> Result<()> {
    if pred.is_empty() {
        return Err(Error::InvalidInput("cannot score an empty forecast".into()));
    }
    if pred.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            context: "predictions vs actuals",
            expected: actual.len(),
            actual: pred.len(),
        });
    }
    Ok(())
}

pub fn mae(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    Ok(pred.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum::<f64>() / pred.len() as f64)
}

pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    let mse = pred.iter().zip(actual).map(|(p, a)| (p - a).powi(2)).sum::<f64>() / pred.len() as f64;
    Ok(mse.sqrt())
}

/// Running sum of absolute errors.
pub fn cumulative_abs_error(pred: &[f64], actual: &[f64]) -> Result<Vec<f64>> {
    check_pair(pred, actual)?;
    let mut total = 0.0;
    Ok(pred
        .iter()
        .zip(actual)
        .map(|(p, a)| {
            total += (p - a).abs();
            total
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

fn bin_index(error: f64, width: f64) -> i64 {
    (error / width).floor() as i64
}

/// Signed errors `pred - actual` counted in `[k·w, (k+1)·w)` bins, from the
/// lowest to the highest occupied bin (empty bins in between included).
pub fn error_histogram(pred: &[f64], actual: &[f64], bin_width: f64) -> Result<Vec<HistogramBin>> {
    check_pair(pred, actual)?;
    let errors: Vec<f64> = pred.iter().zip(actual).map(|(p, a)| p - a).collect();
    histogram_over(&errors, bin_width, None)
}

fn histogram_over(errors: &[f64], width: f64, range: Option<(i64, i64)>) -> Result<Vec<HistogramBin>> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidInput(format!("bin width must be positive, got {width}")));
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidInput("errors must be finite to bin".into()));
    }
    let ks: Vec<i64> = errors.iter().map(|&e| bin_index(e, width)).collect();
    let (lo, hi) = match range {
        Some(r) => r,
        None => match (ks.iter().min(), ks.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Ok(Vec::new()),
        },
    };
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for k in ks {
        counts[(k - lo) as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let k = lo + i as i64;
            HistogramBin {
                low: k as f64 * width,
                high: (k + 1) as f64 * width,
                count,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub model_name: String,
    pub mae: f64,
    pub rmse: f64,
    pub n: usize,
}

impl MetricSummary {
    pub fn compute(model_name: &str, pred: &[f64], actual: &[f64]) -> Result<Self> {
        Ok(Self {
            model_name: model_name.to_string(),
            mae: mae(pred, actual)?,
            rmse: rmse(pred, actual)?,
            n: pred.len(),
        })
    }
}

/// Dated actuals and one prediction path per model.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub dates: Vec<NaiveDate>,
    pub actual: Vec<f64>,
    pub models: Vec<(String, Vec<f64>)>,
}

pub const COMPARISON_HEADER: [&str; 5] = ["date", "actual", HYBRID, SARIMA_ONLY, LSTM_ONLY];

impl Comparison {
    /// The three standard model columns of a report. `actuals` must cover
    /// the horizon.
    pub fn from_report(report: &ForecastReport, actuals: &[f64]) -> Result<Self> {
        if actuals.len() != report.len() {
            return Err(Error::DimensionMismatch {
                context: "actuals over forecast horizon",
                expected: report.len(),
                actual: actuals.len(),
            });
        }
        let mut models = vec![
            (HYBRID.to_string(), report.hybrid()),
            (SARIMA_ONLY.to_string(), report.records.iter().map(|r| r.sarima_only).collect()),
        ];
        if report.records.iter().all(|r| r.lstm_only.is_some()) {
            models.push((
                LSTM_ONLY.to_string(),
                report.records.iter().map(|r| r.lstm_only.unwrap_or(f64::NAN)).collect(),
            ));
        }
        Ok(Self {
            dates: report.records.iter().map(|r| r.date).collect(),
            actual: actuals.to_vec(),
            models,
        })
    }

    fn column(&self, name: &str) -> Option<&[f64]> {
        self.models.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Writes `forecast_comparison.csv` rows. Absent models and NaN actuals
    /// (days not yet observed) leave empty cells.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        write_row(&mut w, path, COMPARISON_HEADER.iter().map(|s| s.to_string()))?;
        for (i, date) in self.dates.iter().enumerate() {
            let actual = self.actual[i];
            let actual = if actual.is_nan() { String::new() } else { actual.to_string() };
            let mut row = vec![date.to_string(), actual];
            for name in &COMPARISON_HEADER[2..] {
                row.push(self.column(name).map(|c| c[i].to_string()).unwrap_or_default());
            }
            write_row(&mut w, path, row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads `forecast_comparison.csv`. Every row needs an actual value.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let err = |m: String| Error::Csv {
            path: path.to_path_buf(),
            message: m,
        };
        let header = reader.headers().map_err(|e| err(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != COMPARISON_HEADER {
            return Err(err(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
        }
        let mut dates = Vec::new();
        let mut actual = Vec::new();
        let mut cols: Vec<Vec<Option<f64>>> = vec![Vec::new(); 3];
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| err(e.to_string()))?;
            let line = i + 2;
            dates.push(
                rec[0]
                    .parse::<NaiveDate>()
                    .map_err(|_| err(format!("line {line}: bad date `{}`", &rec[0])))?,
            );
            if rec[1].is_empty() {
                return Err(Error::InvalidInput(format!(
                    "{}: no actual value on {} (forecast horizon not covered by observations)",
                    path.display(),
                    &rec[0]
                )));
            }
            actual.push(rec[1].parse().map_err(|_| err(format!("line {line}: bad actual")))?);
            for (j, col) in cols.iter_mut().enumerate() {
                let cell = &rec[j + 2];
                col.push(if cell.is_empty() {
                    None
                } else {
                    Some(cell.parse().map_err(|_| err(format!("line {line}: bad value `{cell}`")))?)
                });
            }
        }
        let models = COMPARISON_HEADER[2..]
            .iter()
            .zip(cols)
            .filter_map(|(name, col)| {
                col.into_iter()
                    .collect::<Option<Vec<f64>>>()
                    .filter(|v| !v.is_empty())
                    .map(|v| (name.to_string(), v))
            })
            .collect();
        Ok(Self { dates, actual, models })
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write_row<I: IntoIterator<Item = String>>(w: &mut csv::Writer<std::fs::File>, path: &Path, row: I) -> Result<()> {
    w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Summaries sorted by ascending MAE; ties keep model order.
pub fn summarize(comparison: &Comparison) -> Result<Vec<MetricSummary>> {
    let mut out = comparison
        .models
        .iter()
        .map(|(name, pred)| MetricSummary::compute(name, pred, &comparison.actual))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.mae.total_cmp(&b.mae));
    Ok(out)
}

/// Files written by [`comparison_report`].
pub const METRICS_CSV: &str = "metrics.csv";
pub const METRICS_TXT: &str = "metrics.txt";
pub const COMPARISON_CSV: &str = "forecast_comparison.csv";
pub const CUMULATIVE_CSV: &str = "cumulative_error.csv";
pub const HISTOGRAM_CSV: &str = "error_histogram.csv";
pub const PLOT_SCRIPT: &str = "plots.gp";

/// Scores every model and writes the metric table, forecast comparison,
/// cumulative error curves, error histogram and a gnuplot script.
pub fn comparison_report(comparison: &Comparison, out_dir: &Path, bin_width: f64) -> Result<Vec<MetricSummary>> {
    if comparison.actual.len() != comparison.dates.len() {
        return Err(Error::DimensionMismatch {
            context: "actuals vs dates",
            expected: comparison.dates.len(),
            actual: comparison.actual.len(),
        });
    }
    for (name, pred) in &comparison.models {
        if pred.len() != comparison.actual.len() {
            return Err(Error::InvalidInput(format!(
                "model {name} covers {} days but actuals cover {}",
                pred.len(),
                comparison.actual.len()
            )));
        }
    }
    let summaries = summarize(comparison)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let path = out_dir.join(METRICS_CSV);
    let mut w = csv_writer(&path)?;
    write_row(&mut w, &path, ["model", "mae_c", "rmse_c", "n"].map(String::from))?;
    for s in &summaries {
        write_row(
            &mut w,
            &path,
            [s.model_name.clone(), s.mae.to_string(), s.rmse.to_string(), s.n.to_string()],
        )?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out_dir.join(METRICS_TXT);
    std::fs::write(&path, render_table(&summaries)).map_err(|e| Error::io(&path, e))?;

    comparison.to_csv(&out_dir.join(COMPARISON_CSV))?;

    let path = out_dir.join(CUMULATIVE_CSV);
    let curves: Vec<Option<Vec<f64>>> = COMPARISON_HEADER[2..]
        .iter()
        .map(|name| {
            comparison
                .column(name)
                .map(|p| cumulative_abs_error(p, &comparison.actual))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let mut w = csv_writer(&path)?;
    write_row(&mut w, &path, ["day", HYBRID, SARIMA_ONLY, LSTM_ONLY].map(String::from))?;
    for i in 0..comparison.actual.len() {
        let mut row = vec![(i + 1).to_string()];
        for c in &curves {
            row.push(c.as_ref().map(|v| v[i].to_string()).unwrap_or_default());
        }
        write_row(&mut w, &path, row)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out_dir.join(HISTOGRAM_CSV);
    let errors: Vec<(String, Vec<f64>)> = comparison
        .models
        .iter()
        .map(|(n, p)| (n.clone(), p.iter().zip(&comparison.actual).map(|(a, b)| a - b).collect()))
        .collect();
    let all: Vec<f64> = errors.iter().flat_map(|(_, e)| e.iter().copied()).collect();
    // Shared bin range so every model lists the same bins.
    let ks: Vec<i64> = all.iter().map(|&e| bin_index(e, bin_width)).collect();
    let range = ks.iter().min().copied().zip(ks.iter().max().copied());
    let mut w = csv_writer(&path)?;
    write_row(&mut w, &path, ["bin_low", "bin_high", "model", "count"].map(String::from))?;
    for (name, e) in &errors {
        for bin in histogram_over(e, bin_width, range)? {
            write_row(
                &mut w,
                &path,
                [bin.low.to_string(), bin.high.to_string(), name.clone(), bin.count.to_string()],
            )?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out_dir.join(PLOT_SCRIPT);
    std::fs::write(&path, gnuplot_script()).map_err(|e| Error::io(&path, e))?;
    Ok(summaries)
}

pub fn render_table(summaries: &[MetricSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:>9} {:>9} {:>6}", "model", "MAE (°C)", "RMSE (°C)", "n");
    for s in summaries {
        let _ = writeln!(out, "{:<12} {:>9.3} {:>9.3} {:>6}", s.model_name, s.mae, s.rmse, s.n);
    }
    out
}

fn gnuplot_script() -> String {
    format!(
        r#"# gnuplot -p {PLOT_SCRIPT}
set datafile separator ","
set key autotitle columnhead
set terminal pngcairo size 1200,500

set output "forecast_comparison.png"
set xdata time
set timefmt "%Y-%m-%d"
set format x "%b %Y"
set ylabel "temperature (°C)"
plot "{COMPARISON_CSV}" using 1:2 with lines lw 2, \
     "" using 1:3 with lines, "" using 1:4 with lines, "" using 1:5 with lines

set output "cumulative_error.png"
unset xdata
set format x "%g"
set xlabel "forecast day"
set ylabel "cumulative |error| (°C)"
plot "{CUMULATIVE_CSV}" using 1:2 with lines, "" using 1:3 with lines, "" using 1:4 with lines

set output "error_histogram.png"
set xlabel "error (°C)"
set ylabel "days"
set style fill transparent solid 0.4
plot for [m in "{HYBRID} {SARIMA_ONLY} {LSTM_ONLY}"] "{HISTOGRAM_CSV}" \
     using (($3 eq m) ? ($1 + $2) / 2 : 1/0):4 with boxes title m
"#
    )
}
