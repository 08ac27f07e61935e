use std::path::Path;

use chrono::{Days, NaiveDate};

use super::series::{DailySeries, Variable};
use crate::error::{Error, Result};

/// Exact header of the daily-series CSV format.
pub const CSV_HEADER: [&str; 6] = [
    "date",
    "temperature_c",
    "dew_point_c",
    "pressure_hpa",
    "wind_speed_kmh",
    "visibility_km",
];

fn csv_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads a daily series. Empty cells become missing readings.
pub fn load_csv(path: impl AsRef<Path>) -> Result<DailySeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);

    let header = reader
        .headers()
        .map_err(|e| csv_err(path, e.to_string()))?
        .clone();
    for (i, expected) in CSV_HEADER.iter().enumerate() {
        match header.get(i) {
            Some(h) if h == *expected => {}
            Some(h) => {
                return Err(csv_err(
                    path,
                    format!("unknown column `{h}` at position {i}, expected `{expected}`"),
                ))
            }
            None => return Err(csv_err(path, format!("missing column `{expected}`"))),
        }
    }
    if header.len() > CSV_HEADER.len() {
        return Err(csv_err(
            path,
            format!("unknown column `{}`", &header[CSV_HEADER.len()]),
        ));
    }

    let mut start: Option<NaiveDate> = None;
    let mut columns: [Vec<Option<f64>>; 5] = Default::default();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| csv_err(path, format!("line {line}: {e}")))?;
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|_| csv_err(path, format!("line {line}: invalid date `{}`", &record[0])))?;
        match start {
            None => start = Some(date),
            Some(s) => {
                let expected = s + Days::new(row as u64);
                if date != expected {
                    let kind = if date < expected {
                        "duplicated or out-of-order dates"
                    } else {
                        "non-consecutive dates"
                    };
                    return Err(csv_err(
                        path,
                        format!("line {line}: {kind} (expected {expected}, found {date})"),
                    ));
                }
            }
        }
        for var in Variable::ALL {
            let cell = &record[var.index() + 1];
            let value = if cell.is_empty() {
                None
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    csv_err(
                        path,
                        format!("line {line}: non-numeric value `{cell}` in {}", var.csv_column()),
                    )
                })?;
                if !v.is_finite() {
                    return Err(csv_err(
                        path,
                        format!("line {line}: non-finite value in {}", var.csv_column()),
                    ));
                }
                Some(v)
            };
            columns[var.index()].push(value);
        }
    }
    let start = start.ok_or_else(|| csv_err(path, "file has no data rows"))?;
    DailySeries::new(start, columns)
}

/// Writes a series in the format [`load_csv`] reads.
pub fn write_csv(series: &DailySeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| csv_err(path, e.to_string()))?;
    for (i, date) in series.dates().enumerate() {
        let mut row = Vec::with_capacity(6);
        row.push(date.format("%Y-%m-%d").to_string());
        for var in Variable::ALL {
            row.push(series.column(var)[i].map(|v| v.to_string()).unwrap_or_default());
        }
        writer
            .write_record(&row)
            .map_err(|e| csv_err(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use tempfile::TempDir;

    use super::*;

    fn write(dir: &TempDir, body: &str) -> std::path::PathBuf {
        let path = dir.path().join("data.csv");
        std::fs::write(&path, body).unwrap();
        path
    }

    const HEADER: &str = "date,temperature_c,dew_point_c,pressure_hpa,wind_speed_kmh,visibility_km\n";

    #[test]
    fn reads_well_formed_file() {
        let dir = TempDir::new().unwrap();
        let path = write(
            &dir,
            &format!(
                "{HEADER}2020-01-01,1.5,-2,1013.2,10,16\n2020-01-02,2.5,-1,1012,11,15\n2020-01-03,3,0,1011,12,14\n"
            ),
        );
        let s = load_csv(&path).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.values(Variable::Temperature).unwrap(), vec![1.5, 2.5, 3.0]);
        assert_eq!(s.start_date(), NaiveDate::from_ymd_opt(2020, 1, 1).unwrap());
    }

    #[test]
    fn empty_cell_is_missing() {
        let dir = TempDir::new().unwrap();
        let path = write(
            &dir,
            &format!("{HEADER}2020-01-01,1,1,1,1,1\n2020-01-02,,1,1,1,1\n2020-01-03,3,1,1,1,1\n"),
        );
        let s = load_csv(&path).unwrap();
        assert_eq!(s.column(Variable::Temperature)[1], None);
        assert!(s.column(Variable::DewPoint)[1].is_some());
    }

    #[test]
    fn rejects_date_gap() {
        let dir = TempDir::new().unwrap();
        let path = write(&dir, &format!("{HEADER}2020-01-01,1,1,1,1,1\n2020-01-03,1,1,1,1,1\n"));
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains("non-consecutive dates"), "{err}");
    }

    #[test]
    fn rejects_duplicate_date() {
        let dir = TempDir::new().unwrap();
        let path = write(&dir, &format!("{HEADER}2020-01-01,1,1,1,1,1\n2020-01-01,1,1,1,1,1\n"));
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains("duplicated"), "{err}");
    }

    #[test]
    fn rejects_bad_schema_and_cells() {
        let dir = TempDir::new().unwrap();
        let path = write(&dir, "date,temp,dew_point_c,pressure_hpa,wind_speed_kmh,visibility_km\n");
        assert!(load_csv(&path).unwrap_err().to_string().contains("unknown column `temp`"));

        let path = write(&dir, "date,temperature_c\n2020-01-01,1\n");
        assert!(load_csv(&path).unwrap_err().to_string().contains("missing column"));

        let path = write(&dir, &format!("{HEADER}2020-01-01,abc,1,1,1,1\n"));
        assert!(load_csv(&path).unwrap_err().to_string().contains("non-numeric"));
    }

    #[test]
    fn missing_file_is_missing_artifact() {
        assert!(matches!(
            load_csv("/nonexistent/weather.csv"),
            Err(Error::MissingArtifact(_))
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            offset in 0u64..3000,
            rows in prop::collection::vec(prop::array::uniform5(-1.0e4f64..1.0e4), 1..40),
        ) {
            let start = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap() + Days::new(offset);
            let cols: [Vec<f64>; 5] = std::array::from_fn(|j| rows.iter().map(|r| r[j]).collect());
            let s = DailySeries::from_values(start, cols).unwrap();
            let dir = TempDir::new().unwrap();
            let path = dir.path().join("rt.csv");
            write_csv(&s, &path).unwrap();
            prop_assert_eq!(load_csv(&path).unwrap(), s);
        }
    }
}
