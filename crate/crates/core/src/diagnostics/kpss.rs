use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Published asymptotic critical values of the level-stationarity KPSS
/// statistic, as `(significance, threshold)`.
pub const KPSS_LEVEL_CRITICAL: [(f64, f64); 4] =
    [(0.10, 0.347), (0.05, 0.463), (0.025, 0.574), (0.01, 0.739)];

const MIN_LENGTH: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct KpssResult {
    pub statistic: f64,
    pub lag_truncation: usize,
    /// Keyed by significance level in per-mille (100 = 10 %, 50 = 5 %, ...).
    pub critical_values: BTreeMap<u32, f64>,
    pub stationary_at_5pct: bool,
}

impl KpssResult {
    pub fn critical_at(&self, significance: f64) -> Option<f64> {
        self.critical_values
            .get(&((significance * 1000.0).round() as u32))
            .copied()
    }
}

/// `floor(4 (T/100)^{1/4})`.
pub fn default_lag_truncation(t: usize) -> usize {
    (4.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize
}

/// KPSS test of the null hypothesis that the series is stationary around a
/// constant level. Large statistics reject stationarity.
pub fn kpss_level(series: &TimeSeries, lag_truncation: Option<usize>) -> Result<KpssResult> {
    kpss_values(series.values(), lag_truncation)
}

pub(crate) fn kpss_values(y: &[f64], lag_truncation: Option<usize>) -> Result<KpssResult> {
    let t = y.len();
    if t < MIN_LENGTH {
        return Err(Error::InsufficientData {
            required: MIN_LENGTH,
            actual: t,
        });
    }
    let n = t as f64;
    let mean = y.iter().sum::<f64>() / n;
    let resid: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let scale = mean.abs().max(1.0);
    if resid.iter().all(|e| e.abs() <= 1e-12 * scale) {
        return Err(Error::DegenerateSeries);
    }

    let lags = lag_truncation
        .unwrap_or_else(|| default_lag_truncation(t))
        .min(t - 1);

    // Bartlett-weighted long-run variance.
    let mut lrv = resid.iter().map(|e| e * e).sum::<f64>() / n;
    for s in 1..=lags {
        let weight = 1.0 - s as f64 / (lags as f64 + 1.0);
        let cov: f64 = (s..t).map(|i| resid[i] * resid[i - s]).sum::<f64>() / n;
        lrv += 2.0 * weight * cov;
    }
    if lrv.is_nan() || lrv <= 0.0 {
        return Err(Error::DegenerateSeries);
    }

    let mut partial = 0.0;
    let mut sum_sq = 0.0;
    for e in &resid {
        partial += e;
        sum_sq += partial * partial;
    }
    let statistic = sum_sq / (n * n * lrv);

    let critical_values: BTreeMap<u32, f64> = KPSS_LEVEL_CRITICAL
        .iter()
        .map(|&(alpha, cv)| ((alpha * 1000.0).round() as u32, cv))
        .collect();
    let stationary_at_5pct = statistic < critical_values[&50];
    Ok(KpssResult {
        statistic,
        lag_truncation: lags,
        critical_values,
        stationary_at_5pct,
    })
}
