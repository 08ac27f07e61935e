//! Stacked LSTM regressor trained with Adam on mean absolute error.
//!
//! Everything runs in `f64`; gradients come from hand-written
//! backpropagation through time over the full window.

mod adam;
mod layer;
mod network;
mod train;

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use layer::{cell_step, LstmLayer, GATE_ORDER};
pub use network::{LstmNetwork, LstmParams, WindowPredictor};
pub use train::{loss_mae, train, TrainConfig};
