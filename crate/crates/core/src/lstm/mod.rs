//! Stacked LSTM regressor trained from scratch with backpropagation through
//! time.
//!
//! Each layer runs the standard cell
//!
//! ```text
//! i = σ(W_xi x + b_xi + W_hi h' + b_hi)
//! f = σ(W_xf x + b_xf + W_hf h' + b_hf)
//! o = σ(W_xo x + b_xo + W_ho h' + b_ho)
//! g = tanh(W_xc x + b_xc + W_hc h' + b_hc)
//! c = f ∘ c' + i ∘ g
//! h = o ∘ tanh(c)
//! ```
//!
//! and a linear head maps the top layer's last hidden state to `horizon`
//! outputs.

mod config;
mod gradcheck;
mod io;
mod network;
mod params;
mod sweep;
mod train;

pub use config::LstmConfig;
pub use gradcheck::gradient_check;
pub use io::{load_params, params_to_string, parse_params, save_params};
pub use network::{cell_forward, forward};
pub use params::{Gate, LayerLayout, LayerParams, LstmParams};
pub use sweep::{hyperparameter_sweep, SweepGrid, SweepRow, SweepTable};
pub use train::{
    predict, predict_series, train, train_multivariate, train_series, SeriesForecast, TrainReport, VALUE_SCALE,
};
