use crate::error::{Error, Result};

/// Coefficients of `(1 - B)^d (1 - B^m)^D`, index = lag.
pub(crate) fn differencing_polynomial(d: usize, seasonal_d: usize, m: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mut multiply = |lag: usize| {
        let mut next = vec![0.0; poly.len() + lag];
        for (k, c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + lag] -= c;
        }
        poly = next;
    };
    for _ in 0..d {
        multiply(1);
    }
    for _ in 0..seasonal_d {
        multiply(m);
    }
    poly
}

/// Applies `(1 - B)^d (1 - B^m)^D`. The output is `d + D·m` points shorter.
pub fn difference(values: &[f64], d: usize, seasonal_d: usize, m: usize) -> Result<Vec<f64>> {
    let lost = d + seasonal_d * m;
    if values.len() <= lost {
        return Err(Error::InsufficientData {
            required: lost + 1,
            actual: values.len(),
        });
    }
    let poly = differencing_polynomial(d, seasonal_d, m);
    Ok((lost..values.len())
        .map(|t| {
            poly.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(k, c)| c * values[t - k])
                .sum()
        })
        .collect())
}

/// Inverse of [`difference`]: rebuilds the series from its first `d + D·m`
/// raw values and the differenced sequence.
pub fn undifference(
    initial: &[f64],
    differenced: &[f64],
    d: usize,
    seasonal_d: usize,
    m: usize,
) -> Result<Vec<f64>> {
    let lost = d + seasonal_d * m;
    if initial.len() != lost {
        return Err(Error::ShapeError(format!(
            "need {lost} initial values, got {}",
            initial.len()
        )));
    }
    let poly = differencing_polynomial(d, seasonal_d, m);
    let mut out = initial.to_vec();
    out.reserve(differenced.len());
    for w in differenced {
        out.push(integrate_step(&poly, &out, *w));
    }
    Ok(out)
}

/// Next raw value given its differenced value and the raw history.
pub(crate) fn integrate_step(poly: &[f64], history: &[f64], differenced: f64) -> f64 {
    let t = history.len();
    differenced
        - poly
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| c * history[t - k])
            .sum::<f64>()
}
