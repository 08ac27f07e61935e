//! Hybrid SARIMA-LSTM daily temperature forecasting.
//!
//! A SARIMA model supplies the seasonal baseline, a stacked LSTM learns the
//! baseline's residuals from multivariate weather windows, and a damped
//! recursive loop combines the two over long horizons.

pub mod config;
pub mod error;
pub mod eval;
pub mod features;
pub mod hybrid;
pub mod ingest;
pub mod lstm;
pub mod pipeline;
pub mod sarima;

pub use error::{Error, Result};
