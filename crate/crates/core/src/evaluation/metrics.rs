use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn check(pred: &[f64], actual: &[f64]) -> Result<()> {
    if pred.len() != actual.len() {
        return Err(Error::ShapeError(format!(
            "{} predictions for {} actuals",
            pred.len(),
            actual.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::ShapeError("no points to score".into()));
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check(pred, actual)?;
    let total: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum();
    Ok(total / pred.len() as f64)
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check(pred, actual)?;
    let total: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok((total / pred.len() as f64).sqrt())
}

/// What to do with zero actual values in [`mape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroPolicy {
    /// Skip them and report how many were skipped.
    #[default]
    Exclude,
    Error,
}

/// Mean absolute percentage error as a ratio (0.6 means 60 %), with the
/// number of zero actuals skipped.
pub fn mape(pred: &[f64], actual: &[f64], policy: ZeroPolicy) -> Result<(f64, usize)> {
    check(pred, actual)?;
    let mut total = 0.0;
    let mut used = 0usize;
    for (i, (p, a)) in pred.iter().zip(actual).enumerate() {
        if *a == 0.0 {
            if policy == ZeroPolicy::Error {
                return Err(Error::ZeroActual(i));
            }
            continue;
        }
        total += ((p - a) / a).abs();
        used += 1;
    }
    if used == 0 {
        return Err(Error::UndefinedMetric);
    }
    Ok((total / used as f64, pred.len() - used))
}

/// The three accuracy metrics for one forecast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub mae: f64,
    /// `None` when every actual was zero.
    pub mape: Option<f64>,
    pub rmse: f64,
    pub n: usize,
    pub mape_excluded: usize,
}

impl MetricSet {
    pub fn score(pred: &[f64], actual: &[f64]) -> Result<Self> {
        let mae = mae(pred, actual)?;
        let rmse = rmse(pred, actual)?;
        let (mape, mape_excluded) = match mape(pred, actual, ZeroPolicy::Exclude) {
            Ok((v, skipped)) => (Some(v), skipped),
            Err(Error::UndefinedMetric) => (None, pred.len()),
            Err(e) => return Err(e),
        };
        Ok(Self {
            mae,
            mape,
            rmse,
            n: pred.len(),
            mape_excluded,
        })
    }
}

/// Repeats the last training value.
pub fn naive_last(train: &TimeSeries, steps: usize) -> Vec<f64> {
    vec![train.last(); steps]
}

/// Repeats the training mean.
pub fn naive_mean(train: &TimeSeries, steps: usize) -> Vec<f64> {
    vec![train.mean(); steps]
}
