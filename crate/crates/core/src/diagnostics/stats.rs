use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::{anchored_mean, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct CollectionStats {
    pub per_trace_mean: BTreeMap<String, f64>,
    pub per_trace_std: BTreeMap<String, f64>,
    pub mean_of_means: f64,
    pub std_of_means: f64,
    pub std_of_stds: f64,
}

/// Population standard deviation (divides by `n`).
pub fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = anchored_mean(values);
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn mean(values: &[f64]) -> f64 {
    anchored_mean(values)
}

/// Per-trace means and standard deviations plus their spread across traces.
/// Traces sharing an id are disambiguated by a `#k` suffix.
pub fn collection_stats(traces: &[TimeSeries]) -> Result<CollectionStats> {
    if traces.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let mut per_trace_mean = BTreeMap::new();
    let mut per_trace_std = BTreeMap::new();
    let mut means = Vec::with_capacity(traces.len());
    let mut stds = Vec::with_capacity(traces.len());
    for (k, t) in traces.iter().enumerate() {
        let m = mean(t.values());
        let s = population_std(t.values());
        let mut key = t.id().to_string();
        if per_trace_mean.contains_key(&key) {
            key = format!("{key}#{k}");
        }
        per_trace_mean.insert(key.clone(), m);
        per_trace_std.insert(key, s);
        means.push(m);
        stds.push(s);
    }
    Ok(CollectionStats {
        mean_of_means: mean(&means),
        std_of_means: population_std(&means),
        std_of_stds: population_std(&stds),
        per_trace_mean,
        per_trace_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_constants() {
        let a = TimeSeries::new("a", 1.0, vec![3.0; 5]).unwrap();
        let b = TimeSeries::new("b", 1.0, vec![7.0; 8]).unwrap();
        let s = collection_stats(&[a, b]).unwrap();
        assert_eq!(s.mean_of_means, 5.0);
        assert_eq!(s.std_of_means, 2.0);
        assert_eq!(s.std_of_stds, 0.0);
    }

    #[test]
    fn single_and_empty() {
        let a = TimeSeries::new("a", 1.0, vec![1.0, 2.0, 3.0]).unwrap();
        let s = collection_stats(&[a]).unwrap();
        assert_eq!(s.std_of_means, 0.0);
        assert!((s.per_trace_std["a"] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(matches!(collection_stats(&[]), Err(Error::EmptyCollection)));
    }
}
