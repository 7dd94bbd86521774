use std::f64::consts::PI;

use super::difference::difference;
use super::poly::{is_invertible, is_stable, seasonal_product};
use super::simplex::{minimize, SimplexOptions};
use super::{SarimaModel, SarimaOrder};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Smallest innovation variance allowed in the likelihood; keeps exactly
/// predictable (e.g. constant) series finite.
const MIN_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub simplex: SimplexOptions,
    /// Number of times each start is re-run from its own optimum with a
    /// fresh simplex.
    pub polish_rounds: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            simplex: SimplexOptions::default(),
            polish_rounds: 1,
        }
    }
}

struct Coefficients<'a> {
    ar: &'a [f64],
    ma: &'a [f64],
    seasonal_ar: &'a [f64],
    seasonal_ma: &'a [f64],
}

impl<'a> Coefficients<'a> {
    fn split(order: &SarimaOrder, params: &'a [f64]) -> Self {
        let (ar, rest) = params.split_at(order.p);
        let (ma, rest) = rest.split_at(order.q);
        let (seasonal_ar, seasonal_ma) = rest.split_at(order.seasonal_p);
        Self {
            ar,
            ma,
            seasonal_ar,
            seasonal_ma,
        }
    }

    fn feasible(&self) -> bool {
        is_stable(self.ar)
            && is_stable(self.seasonal_ar)
            && is_invertible(self.ma)
            && is_invertible(self.seasonal_ma)
    }
}

/// Residuals of the multiplicative ARMA recursion on a zero-mean series.
/// Pre-sample observations and residuals are zero.
pub fn conditional_residuals(
    z: &[f64],
    ar: &[f64],
    ma: &[f64],
    seasonal_ar: &[f64],
    seasonal_ma: &[f64],
    m: usize,
) -> Vec<f64> {
    let ar_terms = seasonal_product(ar, seasonal_ar, m, -1.0);
    let ma_terms = seasonal_product(ma, seasonal_ma, m, 1.0);
    residuals_from_terms(z, &ar_terms, &ma_terms)
}

fn residuals_from_terms(z: &[f64], ar_terms: &[(usize, f64)], ma_terms: &[(usize, f64)]) -> Vec<f64> {
    let n = z.len();
    let mut e = vec![0.0; n];
    let max_lag = ar_terms
        .iter()
        .chain(ma_terms)
        .map(|(k, _)| *k)
        .max()
        .unwrap_or(0);
    let warmup = max_lag.min(n);
    for t in 0..warmup {
        let mut v = z[t];
        for &(k, a) in ar_terms {
            if k <= t {
                v -= a * z[t - k];
            }
        }
        for &(k, b) in ma_terms {
            if k <= t {
                v -= b * e[t - k];
            }
        }
        e[t] = v;
    }
    for t in warmup..n {
        let mut v = z[t];
        for &(k, a) in ar_terms {
            v -= a * z[t - k];
        }
        for &(k, b) in ma_terms {
            v -= b * e[t - k];
        }
        e[t] = v;
    }
    e
}

/// Conditional Gaussian log-likelihood with the variance profiled out.
fn profile_loglike(n: usize, sse: f64) -> (f64, f64) {
    let nf = n as f64;
    let variance = (sse / nf).max(MIN_VARIANCE);
    let loglike = -0.5 * nf * ((2.0 * PI * variance).ln() + 1.0);
    (loglike, variance)
}

fn autocorrelation(z: &[f64], lag: usize) -> f64 {
    if lag == 0 || lag >= z.len() {
        return 0.0;
    }
    let denom: f64 = z.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return 0.0;
    }
    (lag..z.len()).map(|t| z[t] * z[t - lag]).sum::<f64>() / denom
}

fn starting_points(order: &SarimaOrder, z: &[f64]) -> Vec<Vec<f64>> {
    let k = order.n_coefficients();
    let zeros = vec![0.0; k];
    let small = vec![0.1; k];
    let r1 = autocorrelation(z, 1).clamp(-0.9, 0.9);
    let rm = autocorrelation(z, order.m).clamp(-0.9, 0.9);
    let mut informed = vec![0.0; k];
    let (p, q, sp) = (order.p, order.q, order.seasonal_p);
    if p > 0 {
        informed[0] = r1;
    } else if q > 0 {
        informed[p] = r1;
    }
    if sp > 0 {
        informed[p + q] = rm;
    } else if order.seasonal_q > 0 {
        informed[p + q + sp] = rm;
    }
    vec![zeros, small, informed]
}

/// Fits `order` to the series by conditional maximum likelihood.
pub fn fit(series: &TimeSeries, order: SarimaOrder) -> Result<SarimaModel> {
    fit_values(series.values(), order, &FitOptions::default())
}

/// [`fit`] over raw values.
///
/// The differenced series is centred on its sample mean; coefficients are
/// found by simplex search from three starts (zeros, all 0.1, and an
/// autocorrelation-informed point). Candidates violating stationarity or
/// invertibility score `+inf`.
pub fn fit_values(values: &[f64], order: SarimaOrder, options: &FitOptions) -> Result<SarimaModel> {
    order.validate()?;
    let w = difference(values, order.d, order.seasonal_d, order.m)?;
    let k = order.n_coefficients();
    let required = 10 * (k + 1);
    if w.len() < required {
        return Err(Error::InsufficientData {
            required: required + order.differencing_loss(),
            actual: values.len(),
        });
    }
    let n = w.len();
    let mean = w.iter().sum::<f64>() / n as f64;
    let z: Vec<f64> = w.iter().map(|v| v - mean).collect();
    let m = order.m;

    let objective = |params: &[f64]| -> f64 {
        let c = Coefficients::split(&order, params);
        if !c.feasible() {
            return f64::INFINITY;
        }
        let ar_terms = seasonal_product(c.ar, c.seasonal_ar, m, -1.0);
        let ma_terms = seasonal_product(c.ma, c.seasonal_ma, m, 1.0);
        let e = residuals_from_terms(&z, &ar_terms, &ma_terms);
        let sse: f64 = e.iter().map(|v| v * v).sum();
        if !sse.is_finite() {
            return f64::INFINITY;
        }
        -profile_loglike(n, sse).0
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starting_points(&order, &z) {
        if !objective(&start).is_finite() {
            continue;
        }
        let mut result = minimize(objective, &start, &options.simplex);
        for _ in 0..options.polish_rounds {
            let again = minimize(objective, &result.x, &options.simplex);
            if again.value <= result.value {
                result = again;
            }
        }
        if result.value.is_finite() && best.as_ref().is_none_or(|(_, v)| result.value < *v) {
            best = Some((result.x, result.value));
        }
    }
    let Some((params, _)) = best else {
        return Err(Error::FitDiverged(order.to_string()));
    };

    let c = Coefficients::split(&order, &params);
    if !c.feasible() {
        return Err(Error::FitDiverged(order.to_string()));
    }
    let e = conditional_residuals(&z, c.ar, c.ma, c.seasonal_ar, c.seasonal_ma, m);
    let sse: f64 = e.iter().map(|v| v * v).sum();
    let (loglike, noise_variance) = profile_loglike(n, sse);

    let ar_at_one =
        (1.0 - c.ar.iter().sum::<f64>()) * (1.0 - c.seasonal_ar.iter().sum::<f64>());
    let tail_len = (order.differencing_loss() + order.p + order.seasonal_p * m).min(values.len());
    let resid_len = (order.q + order.seasonal_q * m).min(e.len());
    let model = SarimaModel {
        order,
        intercept: mean * ar_at_one,
        ar: c.ar.to_vec(),
        ma: c.ma.to_vec(),
        seasonal_ar: c.seasonal_ar.to_vec(),
        seasonal_ma: c.seasonal_ma.to_vec(),
        noise_variance,
        loglike,
        tail: values[values.len() - tail_len..].to_vec(),
        residual_tail: e[e.len() - resid_len..].to_vec(),
    };
    debug_assert!(model.satisfies_root_conditions());
    Ok(model)
}
