use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{forward, loss_and_gradient, sample_masks};
use super::{LstmConfig, LstmParams};
use crate::error::{Error, Result};
use crate::series::{multichannel_windows, sliding_windows, TimeSeries, WindowSet};

/// Percent values are divided by this before entering the network.
pub const VALUE_SCALE: f64 = 100.0;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean per-example training loss of each epoch, in scaled units.
    pub epoch_losses: Vec<f64>,
    pub epochs: usize,
    pub wall_seconds: f64,
}

impl TrainReport {
    pub fn final_loss(&self) -> f64 {
        *self.epoch_losses.last().unwrap_or(&f64::NAN)
    }
}

struct Adam {
    lr: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    fn new(len: usize, lr: f64) -> Self {
        Self {
            lr,
            t: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        for k in 0..params.len() {
            self.m[k] = BETA1 * self.m[k] + (1.0 - BETA1) * grad[k];
            self.v[k] = BETA2 * self.v[k] + (1.0 - BETA2) * grad[k] * grad[k];
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            params[k] -= self.lr * m_hat / (v_hat.sqrt() + EPSILON);
        }
    }
}

/// Trains on every window in sequence order for exactly `max_epochs` epochs.
pub fn train(windows: &WindowSet, config: &LstmConfig) -> Result<(LstmParams, TrainReport)> {
    config.validate()?;
    if windows.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            actual: 0,
        });
    }
    if windows.input_width != config.window
        || windows.horizon != config.horizon
        || windows.channels != config.input_dim
    {
        return Err(Error::ShapeError(format!(
            "windows are {}×{} → {}, config expects {}×{} → {}",
            windows.input_width,
            windows.channels,
            windows.horizon,
            config.window,
            config.input_dim,
            config.horizon
        )));
    }
    let started = Instant::now();
    let inputs: Vec<Vec<f64>> = windows
        .pairs
        .iter()
        .map(|p| p.input.iter().map(|v| v / VALUE_SCALE).collect())
        .collect();
    let targets: Vec<Vec<f64>> = windows
        .pairs
        .iter()
        .map(|p| p.target.iter().map(|v| v / VALUE_SCALE).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = LstmParams::init_with(config, &mut rng);
    let mut adam = Adam::new(params.len(), config.learning_rate);
    let n = inputs.len();
    let mut epoch_losses = Vec::with_capacity(config.max_epochs);

    for epoch in 0..config.max_epochs {
        let mut total = 0.0;
        for start in (0..n).step_by(config.batch_size) {
            let end = (start + config.batch_size).min(n);
            let xs: Vec<&[f64]> = inputs[start..end].iter().map(Vec::as_slice).collect();
            let ys: Vec<&[f64]> = targets[start..end].iter().map(Vec::as_slice).collect();
            let masks = if config.dropout > 0.0 {
                (start..end).map(|_| sample_masks(config, &mut rng)).collect()
            } else {
                Vec::new()
            };
            let (loss, grad) = loss_and_gradient(&params, config, &xs, &ys, masks);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch, loss });
            }
            total += loss * (end - start) as f64;
            adam.step(params.as_mut_slice(), &grad);
        }
        let mean = total / n as f64;
        if !mean.is_finite() || !params.all_finite() {
            return Err(Error::TrainingDiverged { epoch, loss: mean });
        }
        epoch_losses.push(mean);
    }
    Ok((
        params,
        TrainReport {
            epochs: epoch_losses.len(),
            epoch_losses,
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    ))
}

/// Windows a single trace and trains on it.
pub fn train_series(series: &TimeSeries, config: &LstmConfig) -> Result<(LstmParams, TrainReport)> {
    train(&sliding_windows(series, config.window, config.horizon)?, config)
}

/// Trains on aligned channels, predicting `target_channel`. The config's
/// `input_dim` must equal the channel count.
pub fn train_multivariate(
    channels: &[TimeSeries],
    target_channel: usize,
    config: &LstmConfig,
) -> Result<(LstmParams, TrainReport)> {
    if config.input_dim != channels.len() {
        return Err(Error::ShapeError(format!(
            "config input_dim {} but {} channels",
            config.input_dim,
            channels.len()
        )));
    }
    let windows = multichannel_windows(channels, target_channel, config.window, config.horizon)?;
    train(&windows, config)
}

/// Forecasts in percent units for raw (unscaled) input windows.
pub fn predict(params: &LstmParams, config: &LstmConfig, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let scaled: Vec<Vec<f64>> = inputs
        .iter()
        .map(|row| row.iter().map(|v| v / VALUE_SCALE).collect())
        .collect();
    Ok(forward(params, config, &scaled)?
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * VALUE_SCALE).collect())
        .collect())
}

/// Forecasts for every stride-1 window of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesForecast {
    /// Index of each window's first input point.
    pub starts: Vec<usize>,
    /// `horizon` values per window.
    pub forecasts: Vec<Vec<f64>>,
    /// First forecast value of each window, for plotting.
    pub first_step: Vec<f64>,
}

pub fn predict_series(params: &LstmParams, config: &LstmConfig, series: &TimeSeries) -> Result<SeriesForecast> {
    let windows = sliding_windows(series, config.window, config.horizon)?;
    let inputs: Vec<Vec<f64>> = windows.pairs.iter().map(|p| p.input.clone()).collect();
    let forecasts = predict(params, config, &inputs)?;
    Ok(SeriesForecast {
        starts: windows.pairs.iter().map(|p| p.start).collect(),
        first_step: forecasts.iter().map(|f| f[0]).collect(),
        forecasts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> LstmConfig {
        LstmConfig {
            hidden_size: 8,
            num_layers: 1,
            batch_size: 32,
            max_epochs: 30,
            seed,
            ..LstmConfig::default()
        }
    }

    #[test]
    fn constant_series_converges() {
        let s = TimeSeries::new("c", 20.0, vec![50.0; 300]).unwrap();
        let c = small(3);
        let (params, report) = train_series(&s, &c).unwrap();
        assert_eq!(report.epochs, 30);
        assert!(report.final_loss() <= 1e-3, "{:?}", report.epoch_losses);
        let f = predict_series(&params, &c, &s).unwrap();
        assert_eq!(f.forecasts.len(), 300 - 9 + 1);
        assert!(f.first_step.iter().all(|v| (v - 50.0).abs() <= 1.0));
    }

    #[test]
    fn sine_loss_decreases() {
        let values: Vec<f64> = (0..600)
            .map(|t| 50.0 + 30.0 * (std::f64::consts::TAU * t as f64 / 72.0).sin())
            .collect();
        let s = TimeSeries::new("s", 20.0, values).unwrap();
        let (_, report) = train_series(&s, &small(1)).unwrap();
        assert!(report.epoch_losses[29] <= report.epoch_losses[0]);
        assert!(report.epoch_losses.iter().all(|l| l.is_finite() && *l >= 0.0));
    }

    #[test]
    fn deterministic_with_dropout() {
        let values: Vec<f64> = (0..200).map(|t| ((t * 37) % 100) as f64).collect();
        let s = TimeSeries::new("s", 20.0, values).unwrap();
        let c = LstmConfig {
            hidden_size: 5,
            num_layers: 2,
            dropout: 0.3,
            max_epochs: 3,
            seed: 8,
            ..LstmConfig::default()
        };
        let (a, ra) = train_series(&s, &c).unwrap();
        let (b, rb) = train_series(&s, &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.epoch_losses, rb.epoch_losses);
    }

    #[test]
    fn window_config_mismatch() {
        let s = TimeSeries::new("s", 20.0, vec![1.0; 50]).unwrap();
        let w = sliding_windows(&s, 5, 3).unwrap();
        assert!(matches!(train(&w, &small(0)), Err(Error::ShapeError(_))));
    }

    #[test]
    fn short_series_single_forecast() {
        let c = small(0);
        let p = LstmParams::init(&c);
        let s = TimeSeries::new("s", 20.0, vec![5.0; 9]).unwrap();
        let f = predict_series(&p, &c, &s).unwrap();
        assert_eq!(f.forecasts.len(), 1);
        assert_eq!(f.forecasts[0].len(), 3);
        let s = TimeSeries::new("s", 20.0, vec![5.0; 8]).unwrap();
        assert!(matches!(predict_series(&p, &c, &s), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn multivariate_shapes() {
        let channels: Vec<TimeSeries> = (0..50)
            .map(|k| TimeSeries::new(format!("c{k}"), 20.0, vec![(k % 10) as f64 * 5.0; 130]).unwrap())
            .collect();
        let c = LstmConfig {
            input_dim: 50,
            hidden_size: 4,
            num_layers: 1,
            max_epochs: 1,
            ..LstmConfig::default()
        };
        let (params, _) = train_multivariate(&channels, 3, &c).unwrap();
        let batch: Vec<Vec<f64>> = vec![vec![0.1; 6 * 50]; 100];
        let out = forward(&params, &c, &batch).unwrap();
        assert_eq!((out.len(), out[0].len()), (100, 3));

        let mut uneven = channels.clone();
        uneven[7] = TimeSeries::new("short", 20.0, vec![1.0; 100]).unwrap();
        assert!(matches!(
            train_multivariate(&uneven, 0, &c),
            Err(Error::ChannelMismatch { channel: 7, .. })
        ));
    }
}
