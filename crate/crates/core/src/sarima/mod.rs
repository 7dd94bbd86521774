//! Seasonal ARIMA: differencing, conditional maximum-likelihood fitting,
//! recursive forecasting, AIC and grid-search order selection.
//!
//! The model is the multiplicative Box–Jenkins form
//!
//! ```text
//! φ(B) Φ(B^m) (1 - B)^d (1 - B^m)^D (y_t - μ) = θ(B) Θ(B^m) ε_t
//! ```
//!
//! with `φ(B) = 1 - φ₁B - … - φ_pB^p` and `θ(B) = 1 + θ₁B + … + θ_qB^q`.

mod difference;
mod estimate;
mod forecast;
mod io;
pub mod poly;
mod select;
pub mod simplex;

use crate::error::{Error, Result};

pub use difference::{difference, undifference};
pub use estimate::{conditional_residuals, fit, fit_values, FitOptions};
pub use forecast::{forecast, forecast_unclamped};
pub use io::{load_model, model_to_string, parse_model, save_model};
pub use select::{auto_tune, grid_search, Candidate};

/// `SARIMA(p, d, q)(P, D, Q)_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    /// Season length in points.
    pub m: usize,
}

impl SarimaOrder {
    pub fn new(p: usize, d: usize, q: usize, sp: usize, sd: usize, sq: usize, m: usize) -> Result<Self> {
        let order = Self {
            p,
            d,
            q,
            seasonal_p: sp,
            seasonal_d: sd,
            seasonal_q: sq,
            m,
        };
        order.validate()?;
        Ok(order)
    }

    /// Plain `ARMA(p, q)` with no seasonal part.
    pub fn arma(p: usize, q: usize) -> Self {
        Self {
            p,
            d: 0,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            m: 1,
        }
    }

    /// The reference order `(1,0,1)(3,0,3)_m`.
    pub fn reference(m: usize) -> Self {
        Self {
            p: 1,
            d: 0,
            q: 1,
            seasonal_p: 3,
            seasonal_d: 0,
            seasonal_q: 3,
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidOrder("season length must be positive".into()));
        }
        let seasonal = self.seasonal_p > 0 || self.seasonal_q > 0 || self.seasonal_d > 0;
        if seasonal && self.m < 2 {
            return Err(Error::InvalidOrder(format!(
                "seasonal terms need m >= 2, got m = {}",
                self.m
            )));
        }
        if self.d + self.seasonal_d > 2 {
            return Err(Error::InvalidOrder(format!(
                "d + D = {} exceeds 2",
                self.d + self.seasonal_d
            )));
        }
        Ok(())
    }

    /// Number of estimated lag coefficients.
    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Raw observations lost to differencing.
    pub fn differencing_loss(&self) -> usize {
        self.d + self.seasonal_d * self.m
    }
}

impl std::fmt::Display for SarimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SARIMA({},{},{})({},{},{})[{}]",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.m
        )
    }
}

/// A fitted model plus the trailing training data needed to forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct SarimaModel {
    pub order: SarimaOrder,
    /// `c` in `φ(B)Φ(B^m) w_t = c + θ(B)Θ(B^m) ε_t`, with `w` the differenced series.
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub seasonal_ar: Vec<f64>,
    pub seasonal_ma: Vec<f64>,
    pub noise_variance: f64,
    pub loglike: f64,
    /// Last `d + D·m + p + P·m` raw observations.
    pub tail: Vec<f64>,
    /// Last `q + Q·m` in-sample residuals.
    pub residual_tail: Vec<f64>,
}

impl SarimaModel {
    /// `1 - Σφ` times `1 - ΣΦ`, the autoregressive polynomial at `B = 1`.
    fn ar_at_one(&self) -> f64 {
        (1.0 - self.ar.iter().sum::<f64>()) * (1.0 - self.seasonal_ar.iter().sum::<f64>())
    }

    /// Mean of the differenced process.
    pub fn mean(&self) -> f64 {
        self.intercept / self.ar_at_one()
    }

    /// True when both AR polynomials are stationary and both MA polynomials
    /// are invertible.
    pub fn satisfies_root_conditions(&self) -> bool {
        poly::is_stable(&self.ar)
            && poly::is_stable(&self.seasonal_ar)
            && poly::is_invertible(&self.ma)
            && poly::is_invertible(&self.seasonal_ma)
    }

    /// `p + q + P + Q + 2`: lag coefficients plus intercept and variance.
    pub fn n_parameters(&self) -> usize {
        self.order.n_coefficients() + 2
    }
}

/// Akaike information criterion `2k − 2 log L`.
pub fn aic(model: &SarimaModel) -> f64 {
    2.0 * model.n_parameters() as f64 - 2.0 * model.loglike
}

/// Points per day for a given spacing: `1440 / spacing_minutes`.
pub fn season_length(spacing_minutes: f64) -> Result<usize> {
    if !(spacing_minutes.is_finite() && spacing_minutes > 0.0) {
        return Err(Error::InvalidSpacing(spacing_minutes));
    }
    let points = 1440.0 / spacing_minutes;
    let rounded = points.round();
    if rounded < 1.0 || (points - rounded).abs() > 1e-9 {
        return Err(Error::InvalidSpacing(spacing_minutes));
    }
    Ok(rounded as usize)
}
