use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate block order within every weight matrix and bias vector.
pub const GATE_ORDER: &str = "input,forget,cell,output";

/// One LSTM layer. Weight rows are grouped by gate in [`GATE_ORDER`]: row
/// `g·units + j` feeds unit `j` of gate `g`. Matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmLayer {
    pub input_dim: usize,
    pub units: usize,
    /// `4·units × input_dim`
    pub input_weights: Vec<f64>,
    /// `4·units × units`
    pub recurrent_weights: Vec<f64>,
    /// `4·units`
    pub biases: Vec<f64>,
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl LstmLayer {
    pub fn zeros(input_dim: usize, units: usize) -> Self {
        Self {
            input_dim,
            units,
            input_weights: vec![0.0; 4 * units * input_dim],
            recurrent_weights: vec![0.0; 4 * units * units],
            biases: vec![0.0; 4 * units],
        }
    }

    /// Uniform in `[-k, k]` with `k = 1/sqrt(input_dim + units)`; forget
    /// biases start at 1.
    pub fn init<R: Rng>(input_dim: usize, units: usize, rng: &mut R) -> Self {
        let k = 1.0 / ((input_dim + units) as f64).sqrt();
        let mut layer = Self::zeros(input_dim, units);
        for w in layer
            .input_weights
            .iter_mut()
            .chain(layer.recurrent_weights.iter_mut())
        {
            *w = rng.gen_range(-k..=k);
        }
        layer.biases[units..2 * units].fill(1.0);
        layer
    }

    pub(crate) fn check(&self) -> Result<()> {
        let u = self.units;
        let ok = self.input_weights.len() == 4 * u * self.input_dim
            && self.recurrent_weights.len() == 4 * u * u
            && self.biases.len() == 4 * u;
        if !ok {
            return Err(Error::InvalidInput(format!(
                "layer weights do not match input_dim {} and units {u}",
                self.input_dim
            )));
        }
        Ok(())
    }

    /// Gate activations `[i | f | g | o]` for one step.
    fn gates(&self, x: &[f64], h_prev: &[f64]) -> Vec<f64> {
        let (n_in, u) = (self.input_dim, self.units);
        let mut z = self.biases.clone();
        for (r, zr) in z.iter_mut().enumerate() {
            let wi = &self.input_weights[r * n_in..(r + 1) * n_in];
            let wh = &self.recurrent_weights[r * u..(r + 1) * u];
            *zr += dot(wi, x) + dot(wh, h_prev);
        }
        for (r, zr) in z.iter_mut().enumerate() {
            *zr = if r / u == 2 { zr.tanh() } else { sigmoid(*zr) };
        }
        z
    }

    fn step_cached(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> StepCache {
        let u = self.units;
        let gates = self.gates(x, h_prev);
        let mut c = vec![0.0; u];
        let mut tanh_c = vec![0.0; u];
        let mut h = vec![0.0; u];
        for j in 0..u {
            let (i, f, g, o) = (gates[j], gates[u + j], gates[2 * u + j], gates[3 * u + j]);
            c[j] = f * c_prev[j] + i * g;
            tanh_c[j] = c[j].tanh();
            h[j] = o * tanh_c[j];
        }
        StepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            gates,
            tanh_c,
            h,
            c,
        }
    }

    /// Runs the layer over a sequence from zero state, keeping what the
    /// backward pass needs.
    pub(crate) fn forward_sequence(&self, inputs: &[Vec<f64>]) -> Vec<StepCache> {
        let mut h = vec![0.0; self.units];
        let mut c = vec![0.0; self.units];
        let mut caches = Vec::with_capacity(inputs.len());
        for x in inputs {
            let step = self.step_cached(x, &h, &c);
            h.clone_from(&step.h);
            c.clone_from(&step.c);
            caches.push(step);
        }
        caches
    }

    /// Accumulates parameter gradients into `grad` given `d_hidden[t]`, the
    /// loss gradient reaching each output from above. Returns the gradient
    /// with respect to each step's input.
    pub(crate) fn backward_sequence(
        &self,
        caches: &[StepCache],
        d_hidden: &[Vec<f64>],
        grad: &mut LstmLayer,
    ) -> Vec<Vec<f64>> {
        let (n_in, u) = (self.input_dim, self.units);
        let mut dh_next = vec![0.0; u];
        let mut dc_next = vec![0.0; u];
        let mut dz = vec![0.0; 4 * u];
        let mut d_inputs = vec![Vec::new(); caches.len()];

        for t in (0..caches.len()).rev() {
            let cache = &caches[t];
            let gates = &cache.gates;
            for j in 0..u {
                let (i, f, g, o) = (gates[j], gates[u + j], gates[2 * u + j], gates[3 * u + j]);
                let dh = d_hidden[t][j] + dh_next[j];
                let tc = cache.tanh_c[j];
                let d_o = dh * tc;
                let dc = dh * o * (1.0 - tc * tc) + dc_next[j];
                dz[j] = dc * g * i * (1.0 - i);
                dz[u + j] = dc * cache.c_prev[j] * f * (1.0 - f);
                dz[2 * u + j] = dc * i * (1.0 - g * g);
                dz[3 * u + j] = d_o * o * (1.0 - o);
                dc_next[j] = dc * f;
            }

            let mut dx = vec![0.0; n_in];
            dh_next.fill(0.0);
            for (r, &dzr) in dz.iter().enumerate() {
                if dzr == 0.0 {
                    continue;
                }
                grad.biases[r] += dzr;
                let wi = &self.input_weights[r * n_in..(r + 1) * n_in];
                let gi = &mut grad.input_weights[r * n_in..(r + 1) * n_in];
                for k in 0..n_in {
                    gi[k] += dzr * cache.x[k];
                    dx[k] += dzr * wi[k];
                }
                let wh = &self.recurrent_weights[r * u..(r + 1) * u];
                let gh = &mut grad.recurrent_weights[r * u..(r + 1) * u];
                for k in 0..u {
                    gh[k] += dzr * cache.h_prev[k];
                    dh_next[k] += dzr * wh[k];
                }
            }
            d_inputs[t] = dx;
        }
        d_inputs
    }
}

pub(crate) struct StepCache {
    x: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    gates: Vec<f64>,
    tanh_c: Vec<f64>,
    pub(crate) h: Vec<f64>,
    c: Vec<f64>,
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One recurrence step: returns `(hidden, cell)`.
pub fn cell_step(
    layer: &LstmLayer,
    input: &[f64],
    prev_hidden: &[f64],
    prev_cell: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    layer.check()?;
    let dims = [
        ("cell_step input", input.len(), layer.input_dim),
        ("cell_step hidden", prev_hidden.len(), layer.units),
        ("cell_step cell", prev_cell.len(), layer.units),
    ];
    for (context, actual, expected) in dims {
        if actual != expected {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                actual,
            });
        }
    }
    let step = layer.step_cached(input, prev_hidden, prev_cell);
    Ok((step.h, step.c))
}
