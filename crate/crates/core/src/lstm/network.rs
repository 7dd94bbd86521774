//! Forward pass and backpropagation through time.
//!
//! Everything here works in model units; scaling to and from percentages
//! happens in the training and prediction entry points.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::params::{LayerParams, LstmParams};
use super::LstmConfig;
use crate::error::{Error, Result};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Gate activations and states produced by one cell step.
#[derive(Debug, Clone, Default)]
struct StepCache {
    x: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    o: Vec<f64>,
    g: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
}

fn step(layer: &LayerParams<'_>, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> StepCache {
    let hs = layer.hidden;
    let n = layer.in_dim;
    let mut pre = vec![0.0; 4 * hs];
    for (row, a) in pre.iter_mut().enumerate() {
        let wx = &layer.w_x[row * n..(row + 1) * n];
        let wh = &layer.w_h[row * hs..(row + 1) * hs];
        let mut acc = layer.b_x[row] + layer.b_h[row];
        acc += wx.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        acc += wh.iter().zip(h_prev).map(|(w, v)| w * v).sum::<f64>();
        *a = acc;
    }
    let i: Vec<f64> = pre[..hs].iter().map(|&a| sigmoid(a)).collect();
    let f: Vec<f64> = pre[hs..2 * hs].iter().map(|&a| sigmoid(a)).collect();
    let o: Vec<f64> = pre[2 * hs..3 * hs].iter().map(|&a| sigmoid(a)).collect();
    let g: Vec<f64> = pre[3 * hs..].iter().map(|&a| a.tanh()).collect();
    let c: Vec<f64> = (0..hs).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let h: Vec<f64> = (0..hs).map(|k| o[k] * tanh_c[k]).collect();
    StepCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        i,
        f,
        o,
        g,
        tanh_c,
        h,
        c,
    }
}

/// One LSTM cell update:
///
/// ```text
/// i  = σ(W_ii x + b_ii + W_hi h + b_hi)
/// f  = σ(W_if x + b_if + W_hf h + b_hf)
/// o  = σ(W_io x + b_io + W_ho h + b_ho)
/// c̃  = tanh(W_ic x + b_ic + W_hc h + b_hc)
/// c' = f ∘ c + i ∘ c̃
/// h' = o ∘ tanh(c')
/// ```
///
/// Returns `(h', c')`.
pub fn cell_forward(
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    layer: &LayerParams<'_>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != layer.in_dim || h_prev.len() != layer.hidden || c_prev.len() != layer.hidden {
        return Err(Error::ShapeError(format!(
            "cell expects x[{}], h[{}], c[{}]; got x[{}], h[{}], c[{}]",
            layer.in_dim,
            layer.hidden,
            layer.hidden,
            x.len(),
            h_prev.len(),
            c_prev.len()
        )));
    }
    let s = step(layer, x, h_prev, c_prev);
    Ok((s.h, s.c))
}

fn check_batch(params: &LstmParams, config: &LstmConfig, batch: &[Vec<f64>]) -> Result<()> {
    params.check_config(config)?;
    let width = config.window * config.input_dim;
    if let Some(row) = batch.iter().position(|r| r.len() != width) {
        return Err(Error::ShapeError(format!(
            "batch row {row} has {} values, expected window {} × input_dim {}",
            batch[row].len(),
            config.window,
            config.input_dim
        )));
    }
    Ok(())
}

fn head(params: &LstmParams, h_top: &[f64]) -> Vec<f64> {
    let hs = params.hidden;
    let w = params.head_weight();
    params
        .head_bias()
        .iter()
        .enumerate()
        .map(|(r, b)| b + w[r * hs..(r + 1) * hs].iter().zip(h_top).map(|(a, v)| a * v).sum::<f64>())
        .collect()
}

/// Per-example unrolled activations, `caches[layer][t]`.
struct Trace {
    caches: Vec<Vec<StepCache>>,
    /// Inverted-dropout multipliers applied to layer inputs above the first,
    /// `masks[layer - 1][t]`.
    masks: Vec<Vec<Vec<f64>>>,
    output: Vec<f64>,
}

fn unroll(params: &LstmParams, window: usize, input: &[f64], masks: Vec<Vec<Vec<f64>>>) -> Trace {
    let hs = params.hidden;
    let in_dim = params.input_dim;
    let mut caches: Vec<Vec<StepCache>> = Vec::with_capacity(params.num_layers());
    for l in 0..params.num_layers() {
        let layer = params.layer(l);
        let mut h = vec![0.0; hs];
        let mut c = vec![0.0; hs];
        let mut steps = Vec::with_capacity(window);
        for t in 0..window {
            let x: Vec<f64> = if l == 0 {
                input[t * in_dim..(t + 1) * in_dim].to_vec()
            } else {
                let below = &caches[l - 1][t].h;
                match masks.get(l - 1) {
                    Some(m) => below.iter().zip(&m[t]).map(|(v, k)| v * k).collect(),
                    None => below.clone(),
                }
            };
            let s = step(&layer, &x, &h, &c);
            h.clone_from(&s.h);
            c.clone_from(&s.c);
            steps.push(s);
        }
        caches.push(steps);
    }
    let output = head(params, &caches[params.num_layers() - 1][window - 1].h);
    Trace {
        caches,
        masks,
        output,
    }
}

/// Inference: zero initial states, no dropout, linear head on the final
/// top-layer hidden state. Each batch row is `window × input_dim` values.
pub fn forward(params: &LstmParams, config: &LstmConfig, batch: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    check_batch(params, config, batch)?;
    Ok(batch
        .iter()
        .map(|row| unroll(params, config.window, row, Vec::new()).output)
        .collect())
}

/// Samples inverted-dropout masks for one example.
pub(crate) fn sample_masks(config: &LstmConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<f64>>> {
    if config.dropout == 0.0 || config.num_layers < 2 {
        return Vec::new();
    }
    let keep = 1.0 - config.dropout;
    (1..config.num_layers)
        .map(|_| {
            (0..config.window)
                .map(|_| {
                    (0..config.hidden_size)
                        .map(|_| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Mean squared error over a batch and its gradient with respect to every
/// parameter, in storage order. `masks` supplies one dropout mask set per
/// example (empty for a deterministic pass).
pub(crate) fn loss_and_gradient(
    params: &LstmParams,
    config: &LstmConfig,
    inputs: &[&[f64]],
    targets: &[&[f64]],
    mut masks: Vec<Vec<Vec<Vec<f64>>>>,
) -> (f64, Vec<f64>) {
    let hs = params.hidden;
    let horizon = params.horizon;
    let scale = 1.0 / (inputs.len() * horizon) as f64;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;

    for (b, (input, target)) in inputs.iter().zip(targets).enumerate() {
        let example_masks = masks.get_mut(b).map(std::mem::take).unwrap_or_default();
        let trace = unroll(params, config.window, input, example_masks);
        let top = &trace.caches[params.num_layers() - 1][config.window - 1].h;

        // Head.
        let mut dh_top = vec![0.0; hs];
        let head_w = params.head_weight();
        for r in 0..horizon {
            let err = trace.output[r] - target[r];
            loss += err * err * scale;
            let dy = 2.0 * err * scale;
            for k in 0..hs {
                grad[params.head + r * hs + k] += dy * top[k];
                dh_top[k] += dy * head_w[r * hs + k];
            }
            grad[params.head + horizon * hs + r] += dy;
        }

        // External gradient into each layer's hidden state, per time step.
        let mut dh_ext: Vec<Vec<f64>> = vec![vec![0.0; hs]; config.window];
        dh_ext[config.window - 1] = dh_top;

        for l in (0..params.num_layers()).rev() {
            let lay = params.layers[l];
            let layer = params.layer(l);
            let n = lay.in_dim;
            let mut dh_next = vec![0.0; hs];
            let mut dc_next = vec![0.0; hs];
            let mut dx_all: Vec<Vec<f64>> = vec![Vec::new(); config.window];
            for t in (0..config.window).rev() {
                let s = &trace.caches[l][t];
                let mut da = vec![0.0; 4 * hs];
                for k in 0..hs {
                    let dh = dh_ext[t][k] + dh_next[k];
                    let d_o = dh * s.tanh_c[k];
                    let dc = dc_next[k] + dh * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
                    let di = dc * s.g[k];
                    let dg = dc * s.i[k];
                    let df = dc * s.c_prev[k];
                    dc_next[k] = dc * s.f[k];
                    da[k] = di * s.i[k] * (1.0 - s.i[k]);
                    da[hs + k] = df * s.f[k] * (1.0 - s.f[k]);
                    da[2 * hs + k] = d_o * s.o[k] * (1.0 - s.o[k]);
                    da[3 * hs + k] = dg * (1.0 - s.g[k] * s.g[k]);
                }
                let mut dx = vec![0.0; n];
                let mut dh_prev = vec![0.0; hs];
                for (row, &d) in da.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let gx = &mut grad[lay.w_x + row * n..lay.w_x + (row + 1) * n];
                    for (gv, xv) in gx.iter_mut().zip(&s.x) {
                        *gv += d * xv;
                    }
                    let gh = &mut grad[lay.w_h + row * hs..lay.w_h + (row + 1) * hs];
                    for (gv, hv) in gh.iter_mut().zip(&s.h_prev) {
                        *gv += d * hv;
                    }
                    grad[lay.b_x + row] += d;
                    grad[lay.b_h + row] += d;
                    let wx = &layer.w_x[row * n..(row + 1) * n];
                    for (acc, w) in dx.iter_mut().zip(wx) {
                        *acc += d * w;
                    }
                    let wh = &layer.w_h[row * hs..(row + 1) * hs];
                    for (acc, w) in dh_prev.iter_mut().zip(wh) {
                        *acc += d * w;
                    }
                }
                dh_next = dh_prev;
                dx_all[t] = dx;
            }
            if l > 0 {
                dh_ext = dx_all
                    .into_iter()
                    .enumerate()
                    .map(|(t, dx)| match trace.masks.get(l - 1) {
                        Some(m) => dx.iter().zip(&m[t]).map(|(d, k)| d * k).collect(),
                        None => dx,
                    })
                    .collect();
            }
        }
    }
    (loss, grad)
}

/// Deterministic (no dropout) batch loss.
pub(crate) fn batch_loss(params: &LstmParams, config: &LstmConfig, inputs: &[&[f64]], targets: &[&[f64]]) -> f64 {
    let horizon = params.horizon;
    let scale = 1.0 / (inputs.len() * horizon) as f64;
    inputs
        .iter()
        .zip(targets)
        .map(|(x, y)| {
            let out = unroll(params, config.window, x, Vec::new()).output;
            out.iter().zip(y.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * scale
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::super::params::Gate;
    use super::*;

    fn tiny(hidden: usize, layers: usize, window: usize) -> LstmConfig {
        LstmConfig {
            hidden_size: hidden,
            num_layers: layers,
            window,
            horizon: 2,
            ..LstmConfig::default()
        }
    }

    #[test]
    fn zero_weights_give_half_gates() {
        let c = tiny(3, 1, 1);
        let p = LstmParams::zeros(&c);
        let c_prev = [1.0, -2.0, 0.4];
        let (h, cell) = cell_forward(&[0.7], &[0.1, 0.2, 0.3], &c_prev, &p.layer(0)).unwrap();
        for k in 0..3 {
            assert_eq!(cell[k], 0.5 * c_prev[k]);
            assert_eq!(h[k], 0.5 * (0.5 * c_prev[k]).tanh());
        }
        let (h, cell) = cell_forward(&[0.7], &[0.0; 3], &[0.0; 3], &p.layer(0)).unwrap();
        assert!(h.iter().chain(&cell).all(|&v| v == 0.0));
    }

    #[test]
    fn cell_shape_errors() {
        let c = tiny(2, 1, 1);
        let p = LstmParams::zeros(&c);
        assert!(matches!(
            cell_forward(&[0.0, 1.0], &[0.0; 2], &[0.0; 2], &p.layer(0)),
            Err(Error::ShapeError(_))
        ));
    }

    #[test]
    fn single_unit_by_hand() {
        let c = tiny(1, 1, 1);
        let mut p = LstmParams::init(&LstmConfig { seed: 5, ..c });
        let values: Vec<(f64, f64, f64, f64)> = Gate::ALL
            .iter()
            .map(|&g| {
                let (wx, wh, bx, bh) = p.gate_mut(0, g);
                (wx[0], wh[0], bx[0], bh[0])
            })
            .collect();
        let (x, h0, c0) = (0.3, -0.2, 0.6);
        let pre = |k: usize| values[k].0 * x + values[k].2 + values[k].1 * h0 + values[k].3;
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let (i, f, o, g) = (sig(pre(0)), sig(pre(1)), sig(pre(2)), pre(3).tanh());
        let c1 = f * c0 + i * g;
        let h1 = o * c1.tanh();
        let (h, cell) = cell_forward(&[x], &[h0], &[c0], &p.layer(0)).unwrap();
        assert!((h[0] - h1).abs() < 1e-15 && (cell[0] - c1).abs() < 1e-15);

        // Whole network with w = 1, L = 1, H = 1: one cell step then the head.
        let out = forward(&p, &c, &[vec![x]]).unwrap();
        let (h, _) = cell_forward(&[x], &[0.0], &[0.0], &p.layer(0)).unwrap();
        for (r, got) in out[0].iter().enumerate() {
            let expect = p.head_weight()[r] * h[0] + p.head_bias()[r];
            assert!((got - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_params_predict_head_bias() {
        let c = tiny(4, 2, 5);
        let mut p = LstmParams::zeros(&c);
        p.head_bias_mut().copy_from_slice(&[0.25, -1.5]);
        let out = forward(&p, &c, &[vec![0.3; 5], vec![0.9; 5]]).unwrap();
        assert!(out.iter().all(|row| row == &vec![0.25, -1.5]));
    }

    #[test]
    fn rows_are_independent() {
        let c = tiny(3, 2, 4);
        let p = LstmParams::init(&LstmConfig { seed: 1, ..c });
        let rows = vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.9, 0.1, 0.5, 0.2]];
        let single = forward(&p, &c, &rows).unwrap();
        let doubled: Vec<Vec<f64>> = rows.iter().flat_map(|r| [r.clone(), r.clone()]).collect();
        let out = forward(&p, &c, &doubled).unwrap();
        for (k, row) in out.iter().enumerate() {
            assert_eq!(row, &single[k / 2]);
        }
    }

    #[test]
    fn batch_shape_is_checked() {
        let c = tiny(3, 1, 4);
        let p = LstmParams::zeros(&c);
        assert!(matches!(forward(&p, &c, &[vec![0.0; 3]]), Err(Error::ShapeError(_))));
        let other = tiny(5, 1, 4);
        assert!(forward(&p, &other, &[vec![0.0; 4]]).is_err());
    }

    #[test]
    fn hidden_states_are_bounded() {
        let c = tiny(4, 1, 1);
        let mut p = LstmParams::init(&LstmConfig { seed: 2, ..c });
        p.as_mut_slice().iter_mut().for_each(|v| *v *= 40.0);
        let (h, _) = cell_forward(&[3.0], &[0.9; 4], &[50.0; 4], &p.layer(0)).unwrap();
        assert!(h.iter().all(|v| v.abs() <= 1.0 && v.is_finite()));
    }

    #[test]
    fn dropout_free_training_pass_matches_inference() {
        let c = tiny(3, 3, 4);
        let p = LstmParams::init(&LstmConfig { seed: 4, ..c });
        let x = vec![0.2, 0.5, 0.1, 0.7];
        let y = vec![0.3, 0.4];
        let (loss, _) = loss_and_gradient(&p, &c, &[&x], &[&y], Vec::new());
        let out = forward(&p, &c, std::slice::from_ref(&x)).unwrap();
        let direct = ((out[0][0] - 0.3).powi(2) + (out[0][1] - 0.4).powi(2)) / 2.0;
        assert!((loss - direct).abs() < 1e-15);
        assert!((batch_loss(&p, &c, &[&x], &[&y]) - direct).abs() < 1e-15);
    }
}
