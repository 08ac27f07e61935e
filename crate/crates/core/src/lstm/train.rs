use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::adam_step;
use super::network::LstmNetwork;
use crate::error::{Error, Result};
use crate::features::WindowBatch;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Rescale the batch gradient to at most this L2 norm.
    #[serde(default)]
    pub clip_norm: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            epochs: 100,
            batch_size: 32,
            seed: 42,
            clip_norm: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidInput("epochs and batch size must be at least 1".into()));
        }
        if let Some(c) = self.clip_norm {
            if c.is_nan() || c <= 0.0 {
                return Err(Error::InvalidInput(format!("clip norm must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

/// Mean absolute error.
pub fn loss_mae(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::InvalidInput("MAE of an empty vector".into()));
    }
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            context: "MAE inputs",
            expected: predictions.len(),
            actual: targets.len(),
        });
    }
    Ok(predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / predictions.len() as f64)
}

/// Minibatch Adam over `epochs`, reshuffling sample order each epoch with a
/// generator seeded from `config.seed`. Returns the mean training loss of
/// each epoch, measured on each minibatch before its update.
pub fn train(network: &mut LstmNetwork, data: &WindowBatch, config: &TrainConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidInput("training batch is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch = data.select(chunk);
            let (mut grad, loss) = network
                .backward(&batch)
                .map_err(|_| Error::TrainingDiverged { epoch })?;
            if let Some(max_norm) = config.clip_norm {
                let norm = grad.l2_norm();
                if norm > max_norm {
                    let factor = max_norm / norm;
                    for s in grad.slices_mut() {
                        s.iter_mut().for_each(|v| *v *= factor);
                    }
                }
            }
            adam_step(&mut network.params, &mut network.adam, &grad, config.learning_rate)?;
            total += loss * chunk.len() as f64;
        }
        let epoch_loss = total / data.len() as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        log::info!("epoch {epoch}: loss {epoch_loss:.6}");
        history.push(epoch_loss);
    }
    network.train_config = Some(config.clone());
    Ok(history)
}
