//! Accuracy metrics, naive baselines and the model comparison harness.

mod harness;
mod metrics;
mod report;

pub use harness::{
    compare, lstm_holdout, run_model, Aggregate, CellForecast, ColumnStats, EvalReport, EvalRow, Horizon,
    LstmHoldout, Metric, ModelSpec, Overlay, SarimaSpec, WinRate,
};
pub use metrics::{mae, mape, naive_last, naive_mean, rmse, MetricSet, ZeroPolicy};
