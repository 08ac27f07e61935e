use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::layer::{dot, LstmLayer, GATE_ORDER};
use super::train::TrainConfig;
use crate::error::{Error, Result};
use crate::features::WindowBatch;

/// Anything that maps a flattened `window × features` block to a scalar.
pub trait WindowPredictor {
    fn window(&self) -> usize;
    fn features(&self) -> usize;
    fn predict(&self, window: &[f64]) -> Result<f64>;
}

/// Trainable parameters: stacked layers plus a linear head on the last
/// layer's final hidden state. Gradients and Adam moments share this shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub layers: Vec<LstmLayer>,
    pub head_weights: Vec<f64>,
    pub head_bias: Vec<f64>,
}

impl LstmParams {
    pub fn zeros_like(other: &LstmParams) -> Self {
        Self {
            layers: other
                .layers
                .iter()
                .map(|l| LstmLayer::zeros(l.input_dim, l.units))
                .collect(),
            head_weights: vec![0.0; other.head_weights.len()],
            head_bias: vec![0.0; 1],
        }
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for l in &self.layers {
            out.push(&l.input_weights);
            out.push(&l.recurrent_weights);
            out.push(&l.biases);
        }
        out.push(&self.head_weights);
        out.push(&self.head_bias);
        out
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in &mut self.layers {
            out.push(&mut l.input_weights);
            out.push(&mut l.recurrent_weights);
            out.push(&mut l.biases);
        }
        out.push(&mut self.head_weights);
        out.push(&mut self.head_bias);
        out
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.slices().concat()
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        let total: usize = self.slices().iter().map(|s| s.len()).sum();
        if flat.len() != total {
            return Err(Error::DimensionMismatch {
                context: "flat parameter vector",
                expected: total,
                actual: flat.len(),
            });
        }
        let mut offset = 0;
        for s in self.slices_mut() {
            s.copy_from_slice(&flat[offset..offset + s.len()]);
            offset += s.len();
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &LstmParams) -> bool {
        let a = self.slices();
        let b = other.slices();
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.len() == y.len())
    }

    fn scale(&mut self, factor: f64) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Stacked LSTM with Adam state.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmNetwork {
    pub params: LstmParams,
    pub adam: AdamState,
    pub window: usize,
    pub seed: u64,
    /// Configuration of the last training run, echoed on save.
    pub train_config: Option<TrainConfig>,
}

impl LstmNetwork {
    /// Randomly initialized network for `window`-day inputs of
    /// `input_dim` features.
    pub fn new(input_dim: usize, units: &[usize], window: usize, seed: u64) -> Result<Self> {
        if units.is_empty() || units.contains(&0) || input_dim == 0 || window == 0 {
            return Err(Error::InvalidInput(format!(
                "invalid network shape: input_dim {input_dim}, units {units:?}, window {window}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(units.len());
        let mut fan_in = input_dim;
        for &u in units {
            layers.push(LstmLayer::init(fan_in, u, &mut rng));
            fan_in = u;
        }
        let k = 1.0 / (fan_in as f64).sqrt();
        let head_weights = (0..fan_in).map(|_| rng.gen_range(-k..=k)).collect();
        let params = LstmParams {
            layers,
            head_weights,
            head_bias: vec![0.0],
        };
        Self::from_params(params, window, seed)
    }

    pub fn from_params(params: LstmParams, window: usize, seed: u64) -> Result<Self> {
        validate(&params)?;
        Ok(Self {
            adam: AdamState::new(&params),
            params,
            window,
            seed,
            train_config: None,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.params.layers[0].input_dim
    }

    pub fn units(&self) -> Vec<usize> {
        self.params.layers.iter().map(|l| l.units).collect()
    }

    fn split_window(&self, window: &[f64]) -> Result<Vec<Vec<f64>>> {
        let f = self.input_dim();
        if window.len() != self.window * f {
            return Err(Error::DimensionMismatch {
                context: "lstm window (days × features)",
                expected: self.window * f,
                actual: window.len(),
            });
        }
        Ok(window.chunks(f).map(<[f64]>::to_vec).collect())
    }

    /// Forward pass through all layers, keeping per-layer caches.
    fn forward_cached(&self, window: &[f64]) -> Result<(f64, Vec<Vec<super::layer::StepCache>>)> {
        let mut inputs = self.split_window(window)?;
        let mut caches = Vec::with_capacity(self.params.layers.len());
        for layer in &self.params.layers {
            let steps = layer.forward_sequence(&inputs);
            inputs = steps.iter().map(|s| s.h.clone()).collect();
            caches.push(steps);
        }
        let last = inputs.last().expect("window is non-empty");
        let y = dot(&self.params.head_weights, last) + self.params.head_bias[0];
        Ok((y, caches))
    }

    /// Scalar prediction for one flattened window.
    pub fn forward(&self, window: &[f64]) -> Result<f64> {
        Ok(self.forward_cached(window)?.0)
    }

    /// Final hidden state of every layer (for inspection and tests).
    pub fn hidden_states(&self, window: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let (_, caches) = self.forward_cached(window)?;
        Ok(caches
            .iter()
            .map(|steps| steps.iter().map(|s| s.h.clone()).collect())
            .collect())
    }

    /// Mean-MAE gradient over the batch and the batch loss before any
    /// update. Per-sample gradients are summed in sample order.
    pub fn backward(&self, batch: &WindowBatch) -> Result<(LstmParams, f64)> {
        if batch.is_empty() {
            return Err(Error::InvalidInput("cannot backpropagate an empty batch".into()));
        }
        let mut grad = LstmParams::zeros_like(&self.params);
        let mut loss = 0.0;
        for (input, &target) in batch.inputs.iter().zip(&batch.targets) {
            let (pred, caches) = self.forward_cached(input)?;
            let err = pred - target;
            loss += err.abs();
            // Subgradient of |e| is taken as 0 at e = 0.
            let dy = if err > 0.0 {
                1.0
            } else if err < 0.0 {
                -1.0
            } else {
                0.0
            };
            if dy == 0.0 {
                continue;
            }
            self.accumulate_sample(&caches, dy, &mut grad);
        }
        let n = batch.len() as f64;
        grad.scale(1.0 / n);
        let loss = loss / n;
        if !loss.is_finite() || grad.slices().iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::Numerical("gradient overflow during backpropagation".into()));
        }
        Ok((grad, loss))
    }

    fn accumulate_sample(&self, caches: &[Vec<super::layer::StepCache>], dy: f64, grad: &mut LstmParams) {
        let top = caches.last().expect("at least one layer");
        let steps = top.len();
        let h_last = &top[steps - 1].h;
        for (g, h) in grad.head_weights.iter_mut().zip(h_last) {
            *g += dy * h;
        }
        grad.head_bias[0] += dy;

        let top_units = self.params.head_weights.len();
        let mut d_hidden = vec![vec![0.0; top_units]; steps];
        d_hidden[steps - 1] = self.params.head_weights.iter().map(|w| dy * w).collect();

        for (l, layer) in self.params.layers.iter().enumerate().rev() {
            d_hidden = layer.backward_sequence(&caches[l], &d_hidden, &mut grad.layers[l]);
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = NetworkDocument {
            format: "lstm-v1".into(),
            gate_order: GATE_ORDER.into(),
            window: self.window,
            input_dim: self.input_dim(),
            units: self.units(),
            seed: self.seed,
            train_config: self.train_config.clone(),
            params: self.params.clone(),
            adam: self.adam.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDocument = serde_json::from_str(text)?;
        if doc.gate_order != GATE_ORDER {
            return Err(Error::InvalidInput(format!(
                "unsupported gate order `{}`",
                doc.gate_order
            )));
        }
        validate(&doc.params)?;
        if doc.input_dim != doc.params.layers[0].input_dim
            || doc.units != doc.params.layers.iter().map(|l| l.units).collect::<Vec<_>>()
        {
            return Err(Error::InvalidInput("declared dimensions do not match weights".into()));
        }
        if !doc.adam.first.same_shape(&doc.params) || !doc.adam.second.same_shape(&doc.params) {
            return Err(Error::InvalidInput("optimizer state shape mismatch".into()));
        }
        Ok(Self {
            params: doc.params,
            adam: doc.adam,
            window: doc.window,
            seed: doc.seed,
            train_config: doc.train_config,
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

fn validate(params: &LstmParams) -> Result<()> {
    if params.layers.is_empty() {
        return Err(Error::InvalidInput("network has no layers".into()));
    }
    for (i, layer) in params.layers.iter().enumerate() {
        layer.check()?;
        if i > 0 && layer.input_dim != params.layers[i - 1].units {
            return Err(Error::DimensionMismatch {
                context: "stacked layer input",
                expected: params.layers[i - 1].units,
                actual: layer.input_dim,
            });
        }
    }
    let top = params.layers.last().map(|l| l.units).unwrap_or(0);
    if params.head_weights.len() != top || params.head_bias.len() != 1 {
        return Err(Error::DimensionMismatch {
            context: "dense head",
            expected: top,
            actual: params.head_weights.len(),
        });
    }
    if params.slices().iter().any(|s| s.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidInput("non-finite weight".into()));
    }
    Ok(())
}

impl WindowPredictor for LstmNetwork {
    fn window(&self) -> usize {
        self.window
    }

    fn features(&self) -> usize {
        self.input_dim()
    }

    fn predict(&self, window: &[f64]) -> Result<f64> {
        self.forward(window)
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkDocument {
    format: String,
    gate_order: String,
    window: usize,
    input_dim: usize,
    units: Vec<usize>,
    seed: u64,
    train_config: Option<TrainConfig>,
    params: LstmParams,
    adam: AdamState,
}
