//! Daily weather acquisition and repair.
//!
//! A [`DailySeries`] is built either from the Open-Meteo archive or from a
//! local CSV file, then passed through [`fill_gaps`] and
//! [`difference_pressure`] before feature construction.

mod csv_io;
mod open_meteo;
mod repair;
mod series;

pub use csv_io::{load_csv, write_csv, CSV_HEADER};
pub use open_meteo::{cache_file_name, fetch_cached, fetch_open_meteo, parse_archive_response, OpenMeteoClient, ARCHIVE_URL};
pub use repair::{difference_pressure, fill_gaps};
pub use series::{DailySeries, Variable};
