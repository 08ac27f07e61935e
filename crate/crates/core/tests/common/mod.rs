//! Oracles and fixtures shared by the integration tests. The likelihood and
//! simulation oracles do not call into the library's polynomial or
//! filtering code.

#![allow(dead_code)]

use chrono::NaiveDate;
use hybrid_forecast::features::WindowBatch;
use hybrid_forecast::ingest::DailySeries;
use hybrid_forecast::lstm::LstmNetwork;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

/// Polynomial product, lowest degree first.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Random stable lag polynomial of the given order with every root's
/// inverse modulus at most `max_inv`. Returns `[1, c1, c2, ...]` for
/// `prod (1 - r_k B)`.
pub fn random_stable_poly(order: usize, max_inv: f64, rng: &mut impl Rng) -> Vec<f64> {
    match order {
        0 => vec![1.0],
        1 => vec![1.0, -rng.gen_range(-max_inv..max_inv)],
        2 => {
            if rng.gen_bool(0.5) {
                let a = rng.gen_range(-max_inv..max_inv);
                let b = rng.gen_range(-max_inv..max_inv);
                poly_mul(&[1.0, -a], &[1.0, -b])
            } else {
                let rho = rng.gen_range(0.05..max_inv);
                let omega = rng.gen_range(0.0..std::f64::consts::PI);
                vec![1.0, -2.0 * rho * omega.cos(), rho * rho]
            }
        }
        _ => unimplemented!("orders above 2"),
    }
}

/// AR coefficients `phi` for `x_t = sum phi_i x_{t-i} + ...` from a lag
/// polynomial `1 - sum phi_i B^i`.
pub fn ar_from_poly(poly: &[f64]) -> Vec<f64> {
    poly[1..].iter().map(|c| -c).collect()
}

/// MA coefficients `theta` for `... + e_t + sum theta_j e_{t-j}`.
pub fn ma_from_poly(poly: &[f64]) -> Vec<f64> {
    poly[1..].to_vec()
}

/// Autocovariances gamma(0..=max_lag) of a stationary ARMA process from
/// its psi-weights, truncated after `terms` weights.
pub fn arma_autocovariance(ar: &[f64], ma: &[f64], sigma2: f64, max_lag: usize, terms: usize) -> Vec<f64> {
    let mut psi = vec![0.0; terms];
    for j in 0..terms {
        let mut v = if j == 0 {
            1.0
        } else if j <= ma.len() {
            ma[j - 1]
        } else {
            0.0
        };
        for (i, phi) in ar.iter().enumerate() {
            if j > i {
                v += phi * psi[j - i - 1];
            }
        }
        psi[j] = v;
    }
    (0..=max_lag)
        .map(|k| sigma2 * (0..terms - k).map(|j| psi[j] * psi[j + k]).sum::<f64>())
        .collect()
}

/// Multivariate normal log-density of `y` under a zero-mean Toeplitz
/// covariance built from `gamma`.
pub fn dense_gaussian_loglik(gamma: &[f64], y: &[f64]) -> f64 {
    let n = y.len();
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let chol = cov.cholesky().expect("positive definite covariance");
    let l = chol.l();
    let logdet: f64 = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
    let y = DVector::from_column_slice(y);
    let z = chol.solve(&y);
    let quad = y.dot(&z);
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + quad)
}

/// Simulates `(1-B)^d (1-B^s)^D y` as an ARMA process given by full lag
/// polynomials, after `burn_in` discarded draws.
#[allow(clippy::too_many_arguments)]
pub fn simulate_integrated_arma(
    ar_poly: &[f64],
    ma_poly: &[f64],
    d: usize,
    seasonal_d: usize,
    period: usize,
    sigma: f64,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let total = n + burn_in;
    let e: Vec<f64> = (0..total).map(|_| normal.sample(&mut rng)).collect();
    let mut w = vec![0.0; total];
    for t in 0..total {
        let mut v = e[t];
        for (j, c) in ma_poly.iter().enumerate().skip(1) {
            if t >= j {
                v += c * e[t - j];
            }
        }
        for (i, c) in ar_poly.iter().enumerate().skip(1) {
            if t >= i {
                v -= c * w[t - i];
            }
        }
        w[t] = v;
    }
    let mut diff = vec![1.0];
    for _ in 0..d {
        diff = poly_mul(&diff, &[1.0, -1.0]);
    }
    let mut seasonal = vec![0.0; period + 1];
    seasonal[0] = 1.0;
    seasonal[period] = -1.0;
    for _ in 0..seasonal_d {
        diff = poly_mul(&diff, &seasonal);
    }
    let mut y = vec![0.0; total];
    for t in 0..total {
        let mut v = w[t];
        for (i, c) in diff.iter().enumerate().skip(1) {
            if t >= i {
                v -= c * y[t - i];
            }
        }
        y[t] = v;
    }
    y[burn_in..].to_vec()
}

/// Four years of plausible daily weather: an annual temperature cycle with
/// AR(1) anomalies, dew point tracking temperature, and noisy pressure,
/// wind and visibility. A few cells are left missing.
pub fn synthetic_weather(start: NaiveDate, days: usize, seed: u64) -> DailySeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut anomaly = 0.0;
    let mut pressure = 0.0;
    let mut cols: [Vec<Option<f64>>; 5] = Default::default();
    for i in 0..days {
        let day = start + chrono::Days::new(i as u64);
        let doy = chrono::Datelike::ordinal0(&day) as f64;
        anomaly = 0.7 * anomaly + 2.0 * noise.sample(&mut rng);
        pressure = 0.8 * pressure + 4.0 * noise.sample(&mut rng);
        let t = 13.0 + 11.0 * (2.0 * std::f64::consts::PI * (doy - 110.0) / 365.25).sin() + anomaly;
        cols[0].push(Some(t));
        cols[1].push(Some(t - 5.0 + 1.5 * noise.sample(&mut rng)));
        cols[2].push(Some(1015.0 + pressure));
        cols[3].push(Some(12.0 + 4.0 * noise.sample(&mut rng).abs()));
        cols[4].push(Some(20.0 + 3.0 * noise.sample(&mut rng)));
    }
    for &(col, row) in &[(1usize, 40usize), (4, 41), (4, 42), (2, 300)] {
        if row < days {
            cols[col][row] = None;
        }
    }
    DailySeries::new(start, cols).unwrap()
}

pub const GRAD_WINDOW: usize = 4;
pub const GRAD_FEATURES: usize = 3;

/// Batch whose targets sit 0.5 above or below the predictions, far from
/// the MAE kink at the step sizes used, so the loss is linear near the
/// parameters. A small offset keeps rounding noise in the loss low.
pub fn smooth_batch(net: &LstmNetwork, rng: &mut ChaCha8Rng, samples: usize) -> WindowBatch {
    let inputs: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..GRAD_WINDOW * GRAD_FEATURES).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let targets = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let offset = if i % 2 == 0 { 0.5 } else { -0.5 };
            net.forward(x).unwrap() - offset
        })
        .collect();
    WindowBatch {
        window: GRAD_WINDOW,
        features: GRAD_FEATURES,
        inputs,
        targets,
    }
}

pub fn batch_loss(net: &LstmNetwork, batch: &WindowBatch) -> f64 {
    let n = batch.len() as f64;
    batch
        .inputs
        .iter()
        .zip(&batch.targets)
        .map(|(x, t)| (net.forward(x).unwrap() - t).abs())
        .sum::<f64>()
        / n
}

/// Largest relative error between analytic and central-difference
/// gradients. Denominators are floored at 1e-6 so parameters with
/// vanishing gradient do not amplify rounding noise.
pub fn max_relative_error(net: &mut LstmNetwork, batch: &WindowBatch, h: f64) -> f64 {
    let (grad, _) = net.backward(batch).unwrap();
    let analytic = grad.to_flat();
    let mut flat = net.params.to_flat();
    let mut worst: f64 = 0.0;
    for k in 0..flat.len() {
        let orig = flat[k];
        flat[k] = orig + h;
        net.params.set_flat(&flat).unwrap();
        let up = batch_loss(net, batch);
        flat[k] = orig - h;
        net.params.set_flat(&flat).unwrap();
        let down = batch_loss(net, batch);
        flat[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[k].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((analytic[k] - numeric).abs() / denom);
    }
    net.params.set_flat(&flat).unwrap();
    worst
}

/// Gradient check over `count` random units-[3, 2] networks; returns the
/// worst relative error seen.
pub fn gradient_check_sweep(count: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for s in 0..count {
        let mut net = LstmNetwork::new(GRAD_FEATURES, &[3, 2], GRAD_WINDOW, s).unwrap();
        // Spread the weights beyond the initializer's range so gates
        // saturate differently across networks.
        let flat: Vec<f64> = net
            .params
            .to_flat()
            .iter()
            .map(|w| w * rng.gen_range(0.5..3.0))
            .collect();
        net.params.set_flat(&flat).unwrap();
        let b = smooth_batch(&net, &mut rng, 3);
        worst = worst.max(max_relative_error(&mut net, &b, 1e-5));
    }
    worst
}
