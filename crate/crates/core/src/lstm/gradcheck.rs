use super::network::{batch_loss, loss_and_gradient};
use super::{LstmConfig, LstmParams};
use crate::error::{Error, Result};

/// Largest relative disagreement between backpropagated gradients and
/// central finite differences of the batch MSE, over every parameter.
///
/// The relative error of each parameter is
/// `|analytic − numeric| / max(|analytic|, |numeric|, 1e-8)`.
/// The comparison runs without dropout.
pub fn gradient_check(
    params: &LstmParams,
    config: &LstmConfig,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    step: f64,
) -> Result<f64> {
    params.check_config(config)?;
    if inputs.is_empty() || inputs.len() != targets.len() {
        return Err(Error::ShapeError(format!(
            "{} inputs for {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    let width = config.window * config.input_dim;
    if inputs.iter().any(|x| x.len() != width) || targets.iter().any(|y| y.len() != config.horizon) {
        return Err(Error::ShapeError("batch rows do not match the config".into()));
    }
    let xs: Vec<&[f64]> = inputs.iter().map(Vec::as_slice).collect();
    let ys: Vec<&[f64]> = targets.iter().map(Vec::as_slice).collect();
    let (_, analytic) = loss_and_gradient(params, config, &xs, &ys, Vec::new());

    let mut probe = params.clone();
    let mut worst = 0.0f64;
    for (k, &grad) in analytic.iter().enumerate() {
        let original = probe.data[k];
        probe.data[k] = original + step;
        let up = batch_loss(&probe, config, &xs, &ys);
        probe.data[k] = original - step;
        let down = batch_loss(&probe, config, &xs, &ys);
        probe.data[k] = original;
        let numeric = (up - down) / (2.0 * step);
        let denom = grad.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((grad - numeric).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn batch(config: &LstmConfig, rows: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = (0..rows)
            .map(|_| (0..config.window * config.input_dim).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let ys = (0..rows)
            .map(|_| (0..config.horizon).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        (xs, ys)
    }

    fn small(layers: usize, hidden: usize, seed: u64) -> LstmConfig {
        LstmConfig {
            input_dim: 2,
            hidden_size: hidden,
            num_layers: layers,
            window: 4,
            horizon: 2,
            seed,
            ..LstmConfig::default()
        }
    }

    #[test]
    fn backprop_matches_differences() {
        for layers in 1..=2 {
            for hidden in [1, 3] {
                let c = small(layers, hidden, 5);
                let (xs, ys) = batch(&c, 3, 2);
                let err = gradient_check(&LstmParams::init(&c), &c, &xs, &ys, 1e-5).unwrap();
                assert!(err <= 1e-4, "L={layers} H={hidden}: {err}");
            }
        }
    }

    #[test]
    fn coarse_step_is_worse() {
        let c = small(2, 2, 9);
        let (xs, ys) = batch(&c, 2, 4);
        let p = LstmParams::init(&c);
        let fine = gradient_check(&p, &c, &xs, &ys, 1e-5).unwrap();
        let coarse = gradient_check(&p, &c, &xs, &ys, 1e-2).unwrap();
        assert!(coarse > fine);
    }

    #[test]
    fn saturated_gate_stays_finite() {
        let c = small(1, 2, 1);
        let mut p = LstmParams::init(&c);
        for v in p.gate_mut(0, super::super::Gate::Input).2.iter_mut() {
            *v = 60.0;
        }
        let (xs, ys) = batch(&c, 2, 3);
        let err = gradient_check(&p, &c, &xs, &ys, 1e-5).unwrap();
        assert!(err.is_finite() && err <= 1e-4, "{err}");
    }
}
