use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Additive split `value = trend + seasonal + residual`.
///
/// `trend` and `residual` are `None` for the first and last `period / 2`
/// positions, where the centred moving average has no full window.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: Vec<Option<f64>>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<Option<f64>>,
    pub period: usize,
}

/// Classical additive decomposition with a centred moving-average trend.
///
/// Even periods use the `2 × period` average (half weight on the two end
/// points), so every trend value spans exactly one full cycle.
pub fn decompose(series: &TimeSeries, period: usize) -> Result<Decomposition> {
    decompose_values(series.values(), period)
}

pub(crate) fn decompose_values(y: &[f64], period: usize) -> Result<Decomposition> {
    let n = y.len();
    if period == 0 {
        return Err(Error::InvalidConfig("period must be positive".into()));
    }
    if n < 2 * period {
        return Err(Error::InsufficientData {
            required: 2 * period,
            actual: n,
        });
    }
    let half = period / 2;
    let mut trend = vec![None; n];
    if period == 1 {
        trend.iter_mut().zip(y).for_each(|(t, v)| *t = Some(*v));
    } else {
        let m = period as f64;
        for (t, slot) in trend.iter_mut().enumerate().take(n - half).skip(half) {
            let value = if period % 2 == 1 {
                y[t - half..=t + half].iter().sum::<f64>() / m
            } else {
                let inner: f64 = y[t - half + 1..t + half].iter().sum();
                (inner + 0.5 * (y[t - half] + y[t + half])) / m
            };
            *slot = Some(value);
        }
    }

    let mut phase_sum = vec![0.0; period];
    let mut phase_count = vec![0usize; period];
    for (t, tr) in trend.iter().enumerate() {
        if let Some(tr) = tr {
            phase_sum[t % period] += y[t] - tr;
            phase_count[t % period] += 1;
        }
    }
    let mut pattern: Vec<f64> = phase_sum
        .iter()
        .zip(&phase_count)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let centre = pattern.iter().sum::<f64>() / period as f64;
    pattern.iter_mut().for_each(|p| *p -= centre);

    let seasonal: Vec<f64> = (0..n).map(|t| pattern[t % period]).collect();
    let residual = trend
        .iter()
        .enumerate()
        .map(|(t, tr)| tr.map(|tr| y[t] - tr - seasonal[t]))
        .collect();
    Ok(Decomposition {
        trend,
        seasonal,
        residual,
        period,
    })
}

impl Decomposition {
    /// `t,observed,trend,seasonal,residual` with empty fields where absent.
    pub fn to_csv(&self, observed: &[f64]) -> String {
        use crate::textio::fmt_num;
        use std::fmt::Write as _;
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        let mut out = String::from("t,observed,trend,seasonal,residual\n");
        for (t, y) in observed.iter().enumerate() {
            let _ = writeln!(
                out,
                "{t},{},{},{},{}",
                fmt_num(*y),
                opt(self.trend[t]),
                fmt_num(self.seasonal[t]),
                opt(self.residual[t])
            );
        }
        out
    }
}
