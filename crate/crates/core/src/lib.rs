//! Forecasting toolkit for univariate CPU-utilisation traces.
//!
//! The pipeline resamples minute-level traces into 20-minute bins, diagnoses
//! them (collection statistics, KPSS, seasonal decomposition), and compares
//! a seasonal ARIMA model, a stacked LSTM and two naive baselines on a
//! one-hour and a three-day horizon.

pub mod diagnostics;
pub mod error;
pub mod evaluation;
pub mod lstm;
pub mod sarima;
pub mod series;
pub mod synth;
pub mod textio;

pub use error::{Error, Result};
pub use series::{SplitSpec, TimeSeries, WindowSet};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/sarima.md")]
    mod sarima {}
    #[doc = include_str!("../../../book/src/lstm.md")]
    mod lstm {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
