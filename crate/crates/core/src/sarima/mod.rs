//! Seasonal ARIMA estimated by exact Gaussian maximum likelihood.
//!
//! The differenced series is modelled as a multiplicative ARMA process in
//! state-space form; the Kalman filter evaluates the likelihood and
//! Nelder-Mead searches an unconstrained reparameterization that keeps
//! every candidate stationary and invertible.

mod kalman;
mod model;
mod optimizer;
mod polynomial;
mod state_space;
mod transform;

pub use kalman::{filter, kalman_loglik, FilterOutput};
pub use model::{fit, SarimaModel};
pub use optimizer::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use polynomial::{
    difference_polynomial, expand_ar, expand_ma, integrate_forecast, seasonal_difference,
    SarimaParams, SarimaSpec,
};
pub use state_space::{to_state_space, StateSpace};
pub use transform::{constrain_stationary, unconstrain_stationary};
