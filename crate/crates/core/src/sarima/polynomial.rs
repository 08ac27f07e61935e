use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ORDER: usize = 5;

/// Orders of a SARIMA(p,d,q)(P,D,Q)s model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SarimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub period: usize,
}

impl SarimaSpec {
    pub fn new(order: (usize, usize, usize), seasonal: (usize, usize, usize, usize)) -> Result<Self> {
        let spec = Self {
            p: order.0,
            d: order.1,
            q: order.2,
            seasonal_p: seasonal.0,
            seasonal_d: seasonal.1,
            seasonal_q: seasonal.2,
            period: seasonal.3,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Non-seasonal ARIMA(p,d,q).
    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            period: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::InvalidInput("seasonal period must be at least 1".into()));
        }
        if self.period == 1 && (self.seasonal_p + self.seasonal_d + self.seasonal_q) > 0 {
            return Err(Error::InvalidInput(
                "seasonal orders must be zero when the period is 1".into(),
            ));
        }
        let orders = [self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q];
        if orders.iter().any(|&o| o > MAX_ORDER) {
            return Err(Error::InvalidInput(format!(
                "model orders are limited to {MAX_ORDER}, got {orders:?}"
            )));
        }
        Ok(())
    }

    /// Observations consumed by differencing.
    pub fn differencing_loss(&self) -> usize {
        self.d + self.seasonal_d * self.period
    }

    /// Lag order of the expanded AR polynomial.
    pub fn ar_lags(&self) -> usize {
        self.p + self.seasonal_p * self.period
    }

    /// Lag order of the expanded MA polynomial.
    pub fn ma_lags(&self) -> usize {
        self.q + self.seasonal_q * self.period
    }

    /// Number of free ARMA coefficients.
    pub fn coefficient_count(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    pub fn state_dim(&self) -> usize {
        self.ar_lags().max(self.ma_lags() + 1)
    }
}

/// ARMA coefficients with the sign conventions
/// `(1 - Σ ar_i B^i)(1 - Σ sar_j B^js) w_t = (1 + Σ ma_i B^i)(1 + Σ sma_j B^js) e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub seasonal_ar: Vec<f64>,
    pub seasonal_ma: Vec<f64>,
    pub sigma2: f64,
}

impl SarimaParams {
    pub fn zeros(spec: &SarimaSpec) -> Self {
        Self {
            ar: vec![0.0; spec.p],
            ma: vec![0.0; spec.q],
            seasonal_ar: vec![0.0; spec.seasonal_p],
            seasonal_ma: vec![0.0; spec.seasonal_q],
            sigma2: 1.0,
        }
    }

    pub fn check_dims(&self, spec: &SarimaSpec) -> Result<()> {
        let pairs = [
            ("ar coefficients", self.ar.len(), spec.p),
            ("ma coefficients", self.ma.len(), spec.q),
            ("seasonal ar coefficients", self.seasonal_ar.len(), spec.seasonal_p),
            ("seasonal ma coefficients", self.seasonal_ma.len(), spec.seasonal_q),
        ];
        for (context, actual, expected) in pairs {
            if actual != expected {
                return Err(Error::DimensionMismatch {
                    context,
                    expected,
                    actual,
                });
            }
        }
        Ok(())
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Lag polynomial `1 + sign·Σ c_i B^(i·stride)`.
fn lag_poly(coeffs: &[f64], stride: usize, sign: f64) -> Vec<f64> {
    let mut poly = vec![0.0; coeffs.len() * stride + 1];
    poly[0] = 1.0;
    for (i, &c) in coeffs.iter().enumerate() {
        poly[(i + 1) * stride] = sign * c;
    }
    poly
}

/// Expanded AR coefficients `a_1..a_{p+Ps}` such that
/// `w_t = Σ a_k w_{t-k} + ...`.
pub fn expand_ar(spec: &SarimaSpec, params: &SarimaParams) -> Vec<f64> {
    let prod = poly_mul(
        &lag_poly(&params.ar, 1, -1.0),
        &lag_poly(&params.seasonal_ar, spec.period, -1.0),
    );
    prod[1..].iter().map(|c| -c).collect()
}

/// Expanded MA coefficients `b_1..b_{q+Qs}` such that
/// `w_t = ... + e_t + Σ b_k e_{t-k}`.
pub fn expand_ma(spec: &SarimaSpec, params: &SarimaParams) -> Vec<f64> {
    let prod = poly_mul(
        &lag_poly(&params.ma, 1, 1.0),
        &lag_poly(&params.seasonal_ma, spec.period, 1.0),
    );
    prod[1..].to_vec()
}

/// Coefficients of `(1 - B)^d (1 - B^s)^D`, constant term first.
pub fn difference_polynomial(d: usize, seasonal_d: usize, period: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for _ in 0..d {
        poly = poly_mul(&poly, &[1.0, -1.0]);
    }
    for _ in 0..seasonal_d {
        let mut seasonal = vec![0.0; period + 1];
        seasonal[0] = 1.0;
        seasonal[period] = -1.0;
        poly = poly_mul(&poly, &seasonal);
    }
    poly
}

/// Applies `(1 - B)^d (1 - B^s)^D`; the output is `d + D·s` shorter.
pub fn seasonal_difference(series: &[f64], d: usize, seasonal_d: usize, period: usize) -> Result<Vec<f64>> {
    if period == 0 {
        return Err(Error::InvalidInput("seasonal period must be at least 1".into()));
    }
    let loss = d + seasonal_d * period;
    if series.len() <= loss {
        return Err(Error::InsufficientData(format!(
            "differencing removes {loss} observations from a series of {}",
            series.len()
        )));
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    for _ in 0..seasonal_d {
        out = (period..out.len()).map(|t| out[t] - out[t - period]).collect();
    }
    Ok(out)
}

/// Undoes differencing for values that follow `history`:
/// `y_t = w_t - Σ_{k≥1} δ_k y_{t-k}`.
pub fn integrate_forecast(history: &[f64], differenced: &[f64], diff_poly: &[f64]) -> Result<Vec<f64>> {
    let order = diff_poly.len() - 1;
    if history.len() < order {
        return Err(Error::InsufficientData(format!(
            "undifferencing needs {order} past values, got {}",
            history.len()
        )));
    }
    let mut buf: Vec<f64> = history[history.len() - order..].to_vec();
    let mut out = Vec::with_capacity(differenced.len());
    for &w in differenced {
        let n = buf.len();
        let y = w - (1..=order).map(|k| diff_poly[k] * buf[n - k]).sum::<f64>();
        buf.push(y);
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn differencing_examples() {
        assert_eq!(seasonal_difference(&[1.0, 3.0, 6.0], 1, 0, 1).unwrap(), vec![2.0, 3.0]);
        assert_eq!(seasonal_difference(&[1.0, 2.0, 4.0, 7.0], 0, 1, 2).unwrap(), vec![3.0, 5.0]);
        assert_eq!(seasonal_difference(&[1.0, 2.0], 0, 0, 1).unwrap(), vec![1.0, 2.0]);
        assert!(seasonal_difference(&[1.0; 13], 1, 1, 12).is_err());
    }

    #[test]
    fn airline_ar_expansion() {
        let spec = SarimaSpec::new((1, 1, 1), (1, 1, 1, 12)).unwrap();
        let params = SarimaParams {
            ar: vec![0.4],
            ma: vec![0.3],
            seasonal_ar: vec![-0.5],
            seasonal_ma: vec![0.2],
            sigma2: 1.0,
        };
        let a = expand_ar(&spec, &params);
        assert_eq!(a.len(), 13);
        for (k, &c) in a.iter().enumerate() {
            let lag = k + 1;
            let expected = match lag {
                1 => 0.4,
                12 => -0.5,
                13 => -(0.4 * -0.5),
                _ => 0.0,
            };
            assert!((c - expected).abs() < 1e-15, "lag {lag}: {c}");
        }
        let b = expand_ma(&spec, &params);
        assert!((b[0] - 0.3).abs() < 1e-15);
        assert!((b[11] - 0.2).abs() < 1e-15);
        assert!((b[12] - 0.06).abs() < 1e-15);
    }

    #[test]
    fn spec_guards() {
        assert!(SarimaSpec::new((1, 0, 0), (1, 0, 0, 1)).is_err());
        assert!(SarimaSpec::new((6, 0, 0), (0, 0, 0, 1)).is_err());
        assert!(SarimaSpec::new((1, 1, 1), (0, 0, 0, 0)).is_err());
        let s = SarimaSpec::new((1, 1, 1), (1, 1, 1, 12)).unwrap();
        assert_eq!(s.state_dim(), 14);
        assert_eq!(s.differencing_loss(), 13);
    }

    proptest! {
        #[test]
        fn differencing_then_integrating_reconstructs(
            y in prop::collection::vec(-100.0f64..100.0, 30..80),
            d in 0usize..3,
            sd in 0usize..2,
            s in 1usize..7,
        ) {
            let loss = d + sd * s;
            prop_assume!(y.len() > loss + 1);
            let w = seasonal_difference(&y, d, sd, s).unwrap();
            prop_assert_eq!(w.len(), y.len() - loss);
            let poly = difference_polynomial(d, sd, s);
            let rebuilt = integrate_forecast(&y[..loss], &w, &poly).unwrap();
            for (a, b) in rebuilt.iter().zip(&y[loss..]) {
                prop_assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()));
            }
        }
    }
}
