use super::difference::{difference, differencing_polynomial, integrate_step};
use super::poly::seasonal_product;
use super::SarimaModel;
use crate::error::{Error, Result};

/// Multi-step forecast from the end of the training data, clamped to
/// `[0, 100]`.
pub fn forecast(model: &SarimaModel, steps: usize) -> Result<Vec<f64>> {
    Ok(forecast_unclamped(model, steps)?
        .into_iter()
        .map(|v| v.clamp(0.0, 100.0))
        .collect())
}

/// Conditional expectation of the next `steps` raw values: future shocks are
/// zero, known residuals are used while within reach, and differencing is
/// undone against the stored tail.
pub fn forecast_unclamped(model: &SarimaModel, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidConfig("forecast needs at least one step".into()));
    }
    let order = &model.order;
    let m = order.m;
    let lost = order.differencing_loss();
    if model.tail.len() < lost {
        return Err(Error::ShapeError(format!(
            "model tail holds {} values, differencing needs {lost}",
            model.tail.len()
        )));
    }
    let mean = model.mean();

    // Deviations of the differenced tail from the process mean.
    let mut z: Vec<f64> = if model.tail.len() > lost {
        difference(&model.tail, order.d, order.seasonal_d, m)?
            .into_iter()
            .map(|w| w - mean)
            .collect()
    } else {
        Vec::new()
    };
    let mut e = model.residual_tail.clone();

    let ar_terms = seasonal_product(&model.ar, &model.seasonal_ar, m, -1.0);
    let ma_terms = seasonal_product(&model.ma, &model.seasonal_ma, m, 1.0);
    let delta = differencing_polynomial(order.d, order.seasonal_d, m);
    let mut raw = model.tail.clone();

    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let t = z.len();
        let mut next = 0.0;
        for &(k, a) in &ar_terms {
            if k <= t {
                next += a * z[t - k];
            }
        }
        let te = e.len();
        for &(k, b) in &ma_terms {
            if k <= te {
                next += b * e[te - k];
            }
        }
        z.push(next);
        e.push(0.0);
        let value = integrate_step(&delta, &raw, next + mean);
        raw.push(value);
        out.push(value);
    }
    Ok(out)
}
