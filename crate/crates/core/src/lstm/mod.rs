//! Multi-layer LSTM motion model trained online.
//!
//! Gates use the logistic sigmoid for input, forget and output and `tanh`
//! for the candidate; the cell update is `c = c_prev ⊙ f + i ⊙ j` and the
//! hidden state is `h = tanh(c) ⊙ o`. A linear layer maps the top hidden
//! state to the output. Training is full backpropagation through time on a
//! short patch with an Adam update per epoch.

mod adam;
mod bptt;
mod forward;
mod matrix;
mod params;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use bptt::{loss_and_gradient, sequence_loss};
pub use forward::{forward_sequence, forward_step, predict_next};
pub use matrix::Matrix;
pub use params::{Gate, LstmLayerParams, LstmParams, LstmShape, LstmState};
pub use train::{train_online, InputFrame, TrainConfig, Training};
