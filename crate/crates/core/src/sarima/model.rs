use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::kalman::filter;
use super::optimizer::{nelder_mead, NelderMeadOptions};
use super::polynomial::{
    difference_polynomial, expand_ar, expand_ma, integrate_forecast, seasonal_difference,
    SarimaParams, SarimaSpec,
};
use super::state_space::{to_state_space, StateSpace};
use super::transform::{constrain_stationary, unconstrain_stationary};
use crate::error::{Error, Result};

/// Starting value for every coefficient when no CSS estimate is available.
const DEFAULT_START: f64 = 0.1;

/// A fitted SARIMA model together with the series it was fitted on.
#[derive(Debug, Clone, PartialEq)]
pub struct SarimaModel {
    pub spec: SarimaSpec,
    pub params: SarimaParams,
    pub loglik: f64,
    training_series: Vec<f64>,
}

/// Splits an unconstrained vector into the four coefficient groups.
fn unpack(spec: &SarimaSpec, x: &[f64], sigma2: f64) -> SarimaParams {
    let (ar, rest) = x.split_at(spec.p);
    let (ma, rest) = rest.split_at(spec.q);
    let (sar, sma) = rest.split_at(spec.seasonal_p);
    let negate = |v: Vec<f64>| v.into_iter().map(|c| -c).collect();
    SarimaParams {
        ar: constrain_stationary(ar),
        ma: negate(constrain_stationary(ma)),
        seasonal_ar: constrain_stationary(sar),
        seasonal_ma: negate(constrain_stationary(sma)),
        sigma2,
    }
}

fn pack(params: &SarimaParams) -> Result<Vec<f64>> {
    let negated = |v: &[f64]| v.iter().map(|c| -c).collect::<Vec<_>>();
    let mut x = unconstrain_stationary(&params.ar)?;
    x.extend(unconstrain_stationary(&negated(&params.ma))?);
    x.extend(unconstrain_stationary(&params.seasonal_ar)?);
    x.extend(unconstrain_stationary(&negated(&params.seasonal_ma))?);
    Ok(x)
}

/// Conditional sum of squares with zero pre-sample innovations.
fn css(spec: &SarimaSpec, params: &SarimaParams, w: &[f64]) -> f64 {
    let a = expand_ar(spec, params);
    let b = expand_ma(spec, params);
    let start = a.len();
    let mut e = vec![0.0; w.len()];
    let mut total = 0.0;
    for t in start..w.len() {
        let mut pred = 0.0;
        for (k, &ak) in a.iter().enumerate() {
            pred += ak * w[t - k - 1];
        }
        for (k, &bk) in b.iter().enumerate() {
            if t > k {
                pred += bk * e[t - k - 1];
            }
        }
        e[t] = w[t] - pred;
        total += e[t] * e[t];
    }
    total
}

fn concentrated_negloglik(spec: &SarimaSpec, x: &[f64], w: &[f64]) -> f64 {
    let params = unpack(spec, x, 1.0);
    let system = StateSpace::from_arma(&expand_ar(spec, &params), &expand_ma(spec, &params), 1.0);
    match filter(&system, w) {
        Ok(out) if out.sigma2_mle() > 0.0 => -out.concentrated_loglik(),
        _ => f64::INFINITY,
    }
}

fn css_start(spec: &SarimaSpec, w: &[f64], options: &NelderMeadOptions) -> Option<Vec<f64>> {
    let k = spec.coefficient_count();
    if w.len() <= spec.ar_lags() + k {
        return None;
    }
    let default = pack(&unpack_constrained_default(spec)).ok()?;
    let res = nelder_mead(|x| css(spec, &unpack(spec, x, 1.0), w), &default, options).ok()?;
    res.point.iter().all(|v| v.is_finite()).then_some(res.point)
}

fn unpack_constrained_default(spec: &SarimaSpec) -> SarimaParams {
    SarimaParams {
        ar: vec![DEFAULT_START; spec.p],
        ma: vec![DEFAULT_START; spec.q],
        seasonal_ar: vec![DEFAULT_START; spec.seasonal_p],
        seasonal_ma: vec![DEFAULT_START; spec.seasonal_q],
        sigma2: 1.0,
    }
}

/// Fits by exact maximum likelihood. Deterministic for a given series.
pub fn fit(spec: SarimaSpec, series: &[f64]) -> Result<SarimaModel> {
    fit_with(spec, series, &NelderMeadOptions::default())
}

pub(crate) fn fit_with(spec: SarimaSpec, series: &[f64], options: &NelderMeadOptions) -> Result<SarimaModel> {
    spec.validate()?;
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("series contains non-finite values".into()));
    }
    let adequate = 10 * (spec.differencing_loss() + spec.ar_lags() + spec.ma_lags());
    if series.len() < adequate {
        log::warn!(
            "series of {} observations is short for this SARIMA order (guideline {adequate})",
            series.len()
        );
    }
    let w = seasonal_difference(series, spec.d, spec.seasonal_d, spec.period)?;
    if w.len() < 2 {
        return Err(Error::InsufficientData(
            "fewer than 2 observations remain after differencing".into(),
        ));
    }

    let start = match css_start(&spec, &w, options) {
        Some(x) if concentrated_negloglik(&spec, &x, &w).is_finite() => x,
        _ => pack(&unpack_constrained_default(&spec))?,
    };

    let res = nelder_mead(|x| concentrated_negloglik(&spec, x, &w), &start, options)?;
    if !res.value.is_finite() {
        return Err(Error::Numerical("likelihood is not finite at any iterate".into()));
    }
    let unit = unpack(&spec, &res.point, 1.0);
    let system = StateSpace::from_arma(&expand_ar(&spec, &unit), &expand_ma(&spec, &unit), 1.0);
    let out = filter(&system, &w)?;
    let params = SarimaParams {
        sigma2: out.sigma2_mle(),
        ..unit
    };
    to_state_space(&spec, &params)?;
    Ok(SarimaModel {
        spec,
        params,
        loglik: out.concentrated_loglik(),
        training_series: series.to_vec(),
    })
}

impl SarimaModel {
    /// A model with given parameters, bypassing estimation.
    pub fn from_parameters(spec: SarimaSpec, params: SarimaParams, series: &[f64]) -> Result<Self> {
        spec.validate()?;
        let system = to_state_space(&spec, &params)?;
        let w = seasonal_difference(series, spec.d, spec.seasonal_d, spec.period)?;
        let loglik = filter(&system, &w)?.loglik(params.sigma2);
        Ok(Self {
            spec,
            params,
            loglik,
            training_series: series.to_vec(),
        })
    }

    pub fn training_series(&self) -> &[f64] {
        &self.training_series
    }

    pub fn state_space(&self) -> Result<StateSpace> {
        to_state_space(&self.spec, &self.params)
    }

    fn differenced(&self) -> Result<Vec<f64>> {
        seasonal_difference(
            &self.training_series,
            self.spec.d,
            self.spec.seasonal_d,
            self.spec.period,
        )
    }

    /// `horizon` steps past the end of the training series, in original units.
    pub fn forecast(&self, horizon: usize) -> Result<Vec<f64>> {
        if horizon == 0 {
            return Ok(Vec::new());
        }
        let system = self.state_space()?;
        let out = filter(&system, &self.differenced()?)?;
        let mut state = out.next_state;
        let mut w = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            w.push(state[0]);
            let s0 = state[0];
            let r = state.len();
            for i in 0..r {
                let below = if i + 1 < r { state[i + 1] } else { 0.0 };
                state[i] = system.ar[i] * s0 + below;
            }
        }
        let poly = difference_polynomial(self.spec.d, self.spec.seasonal_d, self.spec.period);
        let y = integrate_forecast(&self.training_series, &w, &poly)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("forecast is not finite".into()));
        }
        Ok(y)
    }

    /// `actual − one-step prediction` over the training period. The first
    /// `d + D·s` entries have no prediction and are 0.
    pub fn in_sample_residuals(&self) -> Result<Vec<f64>> {
        // Undifferencing adds known past values to both sides, so the
        // residual on the original scale is the differenced innovation.
        let system = self.state_space()?;
        let out = filter(&system, &self.differenced()?)?;
        let mut residuals = vec![0.0; self.spec.differencing_loss()];
        residuals.extend(out.innovations);
        Ok(residuals)
    }

    fn document(&self) -> SarimaDocument {
        SarimaDocument {
            spec: self.spec,
            ar: self.params.ar.clone(),
            ma: self.params.ma.clone(),
            seasonal_ar: self.params.seasonal_ar.clone(),
            seasonal_ma: self.params.seasonal_ma.clone(),
            sigma2: self.params.sigma2,
            loglik: self.loglik,
            training_digest: series_digest(&self.training_series),
            training_series: self.training_series.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SarimaDocument = serde_json::from_str(text)?;
        let digest = series_digest(&doc.training_series);
        if digest != doc.training_digest {
            return Err(Error::InvalidInput(format!(
                "training series digest mismatch: stored {}, computed {digest}",
                doc.training_digest
            )));
        }
        let params = SarimaParams {
            ar: doc.ar,
            ma: doc.ma,
            seasonal_ar: doc.seasonal_ar,
            seasonal_ma: doc.seasonal_ma,
            sigma2: doc.sigma2,
        };
        doc.spec.validate()?;
        to_state_space(&doc.spec, &params)?;
        Ok(Self {
            spec: doc.spec,
            params,
            loglik: doc.loglik,
            training_series: doc.training_series,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct SarimaDocument {
    spec: SarimaSpec,
    ar: Vec<f64>,
    ma: Vec<f64>,
    seasonal_ar: Vec<f64>,
    seasonal_ma: Vec<f64>,
    sigma2: f64,
    loglik: f64,
    training_digest: String,
    training_series: Vec<f64>,
}

/// SHA-256 over the little-endian bytes of every value.
fn series_digest(series: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for v in series {
        hasher.update(v.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}
