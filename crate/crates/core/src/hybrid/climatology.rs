use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};

pub const DAY_SLOTS: usize = 366;

/// Per-day-of-year means of the exogenous features, in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Climatology {
    /// `DAY_SLOTS` rows, one per zero-based day of year.
    pub means: Vec<Vec<f64>>,
}

impl Climatology {
    /// Averages `rows[i]` by the day of year of `start + i`. Slots with no
    /// observations take the nearest observed slot (circularly, the preceding
    /// slot on ties).
    pub fn from_rows(start: NaiveDate, rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InsufficientData("climatology needs at least one day".into()))?;
        let mut sums = vec![vec![0.0; width]; DAY_SLOTS];
        let mut counts = vec![0usize; DAY_SLOTS];
        for (i, row) in rows.iter().enumerate() {
            let slot = (start + chrono::Days::new(i as u64)).ordinal0() as usize;
            for (s, v) in sums[slot].iter_mut().zip(row) {
                *s += v;
            }
            counts[slot] += 1;
        }
        let observed: Vec<usize> = (0..DAY_SLOTS).filter(|&s| counts[s] > 0).collect();
        let means = (0..DAY_SLOTS)
            .map(|slot| {
                let source = if counts[slot] > 0 {
                    slot
                } else {
                    *observed
                        .iter()
                        .min_by_key(|&&o| {
                            let d = o.abs_diff(slot);
                            (d.min(DAY_SLOTS - d), (slot + DAY_SLOTS - o) % DAY_SLOTS)
                        })
                        .expect("at least one observed slot")
                };
                sums[source]
                    .iter()
                    .map(|s| s / counts[source] as f64)
                    .collect()
            })
            .collect();
        Ok(Self { means })
    }

    pub fn for_date(&self, date: NaiveDate) -> &[f64] {
        &self.means[date.ordinal0() as usize]
    }

    pub fn width(&self) -> usize {
        self.means[0].len()
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut header = vec!["day_of_year".to_string()];
        header.extend((0..self.width()).map(|j| format!("feature_{j}")));
        let mut rows = vec![header];
        for (slot, row) in self.means.iter().enumerate() {
            let mut r = vec![slot.to_string()];
            r.extend(row.iter().map(|v| v.to_string()));
            rows.push(r);
        }
        for r in rows {
            writer.write_record(&r).map_err(|e| Error::Csv {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        }
        writer.flush().map_err(|e| Error::io(path, e))
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let csv_err = |m: String| Error::Csv {
            path: path.to_path_buf(),
            message: m,
        };
        let mut means = Vec::with_capacity(DAY_SLOTS);
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| csv_err(e.to_string()))?;
            let slot: usize = rec[0].parse().map_err(|_| csv_err(format!("bad slot `{}`", &rec[0])))?;
            if slot != i {
                return Err(csv_err(format!("expected slot {i}, found {slot}")));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|c| c.parse::<f64>().map_err(|_| csv_err(format!("bad value `{c}`"))))
                .collect::<Result<Vec<_>>>()?;
            means.push(row);
        }
        if means.len() != DAY_SLOTS {
            return Err(csv_err(format!("expected {DAY_SLOTS} slots, found {}", means.len())));
        }
        Ok(Self { means })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averages_by_day_of_year_and_fills_gaps() {
        let start = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        // Two non-leap years: slot 365 (Dec 31 of a leap year) is never seen.
        let rows: Vec<Vec<f64>> = (0..730).map(|i| vec![i as f64]).collect();
        let c = Climatology::from_rows(start, &rows).unwrap();
        assert_eq!(c.means.len(), DAY_SLOTS);
        assert_eq!(c.means[0], vec![(0.0 + 365.0) / 2.0]);
        // Slot 365 is equidistant from 364 and 0 and takes the preceding one.
        assert_eq!(c.means[365], c.means[364]);
    }

    #[test]
    fn csv_round_trip() {
        let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let rows: Vec<Vec<f64>> = (0..400).map(|i| vec![i as f64 * 0.1, -(i as f64)]).collect();
        let c = Climatology::from_rows(start, &rows).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clim.csv");
        c.to_csv(&path).unwrap();
        assert_eq!(Climatology::from_csv(&path).unwrap(), c);
    }
}
