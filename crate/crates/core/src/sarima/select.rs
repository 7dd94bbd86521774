use rayon::prelude::*;

use super::estimate::{fit_values, FitOptions};
use super::{aic, SarimaModel, SarimaOrder};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// One grid point and its fit outcome.
#[derive(Debug)]
pub struct Candidate {
    pub order: SarimaOrder,
    pub fit: Result<SarimaModel>,
}

impl Candidate {
    pub fn aic(&self) -> Option<f64> {
        self.fit.as_ref().ok().map(aic)
    }
}

/// Fits every `(p, q, P, Q) ∈ [0, max_order]⁴` with `d = D = 0`, in
/// lexicographic order. Seasonal orders are held at zero when `m < 2`.
/// Candidates are fitted in parallel on the current rayon pool.
pub fn grid_search(series: &TimeSeries, max_order: usize, m: usize) -> Vec<Candidate> {
    let seasonal_max = if m >= 2 { max_order } else { 0 };
    let mut orders = Vec::new();
    for p in 0..=max_order {
        for q in 0..=max_order {
            for sp in 0..=seasonal_max {
                for sq in 0..=seasonal_max {
                    orders.push(SarimaOrder {
                        p,
                        d: 0,
                        q,
                        seasonal_p: sp,
                        seasonal_d: 0,
                        seasonal_q: sq,
                        m: m.max(1),
                    });
                }
            }
        }
    }
    let values = series.values();
    orders
        .into_par_iter()
        .map(|order| Candidate {
            order,
            fit: fit_values(values, order, &FitOptions::default()),
        })
        .collect()
}

/// Minimum-AIC model over [`grid_search`]. Ties go to the lexicographically
/// smallest `(p, q, P, Q)`.
pub fn auto_tune(series: &TimeSeries, max_order: usize, m: usize) -> Result<(SarimaOrder, SarimaModel)> {
    let mut best: Option<(f64, SarimaOrder, SarimaModel)> = None;
    for candidate in grid_search(series, max_order, m) {
        let Ok(model) = candidate.fit else { continue };
        let score = aic(&model);
        if !score.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
            best = Some((score, candidate.order, model));
        }
    }
    best.map(|(_, order, model)| (order, model))
        .ok_or(Error::NoFeasibleModel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_order_zero_is_white_noise() {
        let values: Vec<f64> = (0..100).map(|t| 40.0 + ((t * 7) % 5) as f64).collect();
        let s = TimeSeries::new("w", 1.0, values).unwrap();
        let (order, model) = auto_tune(&s, 0, 24).unwrap();
        assert_eq!(order.n_coefficients(), 0);
        assert!((model.mean() - s.mean()).abs() < 1e-12);
        assert_eq!(grid_search(&s, 0, 24).len(), 1);
    }

    #[test]
    fn grid_is_lexicographic() {
        let s = TimeSeries::new("w", 1.0, vec![1.0; 300]).unwrap();
        let grid = grid_search(&s, 1, 4);
        assert_eq!(grid.len(), 16);
        let orders: Vec<_> = grid
            .iter()
            .map(|c| (c.order.p, c.order.q, c.order.seasonal_p, c.order.seasonal_q))
            .collect();
        let mut sorted = orders.clone();
        sorted.sort();
        assert_eq!(orders, sorted);
        assert_eq!(grid_search(&s, 2, 1).len(), 9);
    }

    #[test]
    fn nothing_feasible() {
        let s = TimeSeries::new("w", 1.0, vec![1.0; 5]).unwrap();
        assert!(matches!(auto_tune(&s, 1, 1), Err(Error::NoFeasibleModel)));
    }
}
