//! Trace diagnostics: collection statistics, KPSS level-stationarity test and
//! classical additive decomposition.

mod decompose;
mod kpss;
mod stats;

pub use decompose::{decompose, Decomposition};
pub use kpss::{default_lag_truncation, kpss_level, KpssResult, KPSS_LEVEL_CRITICAL};
pub use stats::{collection_stats, population_std, CollectionStats};
