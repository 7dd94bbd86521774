use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LstmConfig;
use crate::error::{Error, Result};

/// The four gate blocks, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input,
    Forget,
    Output,
    Cell,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Output, Gate::Cell];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::Input => "input",
            Gate::Forget => "forget",
            Gate::Output => "output",
            Gate::Cell => "cell",
        }
    }
}

/// Offsets of one layer's tensors inside the flat parameter vector.
///
/// `w_x` is `4H × in_dim` and `w_h` is `4H × H`, both row-major with gate
/// `g` occupying rows `g·H .. (g+1)·H`; `b_x` and `b_h` have `4H` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerLayout {
    pub in_dim: usize,
    pub w_x: usize,
    pub w_h: usize,
    pub b_x: usize,
    pub b_h: usize,
    pub end: usize,
}

/// Borrowed view of one layer's weights.
#[derive(Debug, Clone, Copy)]
pub struct LayerParams<'a> {
    pub in_dim: usize,
    pub hidden: usize,
    pub w_x: &'a [f64],
    pub w_h: &'a [f64],
    pub b_x: &'a [f64],
    pub b_h: &'a [f64],
}

/// All weights of a stacked LSTM plus its linear head, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub(crate) input_dim: usize,
    pub(crate) hidden: usize,
    pub(crate) horizon: usize,
    pub(crate) layers: Vec<LayerLayout>,
    /// Head weight (`horizon × H`) offset; the bias follows it.
    pub(crate) head: usize,
    pub(crate) data: Vec<f64>,
}

impl LstmParams {
    /// All-zero parameters shaped for `config`.
    pub fn zeros(config: &LstmConfig) -> Self {
        let h = config.hidden_size;
        let mut layers = Vec::with_capacity(config.num_layers);
        let mut offset = 0;
        for l in 0..config.num_layers {
            let in_dim = if l == 0 { config.input_dim } else { h };
            let w_x = offset;
            let w_h = w_x + 4 * h * in_dim;
            let b_x = w_h + 4 * h * h;
            let b_h = b_x + 4 * h;
            let end = b_h + 4 * h;
            layers.push(LayerLayout {
                in_dim,
                w_x,
                w_h,
                b_x,
                b_h,
                end,
            });
            offset = end;
        }
        let head = offset;
        let total = head + config.horizon * h + config.horizon;
        Self {
            input_dim: config.input_dim,
            hidden: h,
            horizon: config.horizon,
            layers,
            head,
            data: vec![0.0; total],
        }
    }

    /// Uniform `[-1/√H, 1/√H]` initialisation drawn from the config seed.
    pub fn init(config: &LstmConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self::init_with(config, &mut rng)
    }

    pub(crate) fn init_with(config: &LstmConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut p = Self::zeros(config);
        let bound = 1.0 / (config.hidden_size as f64).sqrt();
        for v in p.data.iter_mut() {
            *v = rng.random_range(-bound..=bound);
        }
        p
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Every parameter in storage order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn layer(&self, l: usize) -> LayerParams<'_> {
        let lay = self.layers[l];
        LayerParams {
            in_dim: lay.in_dim,
            hidden: self.hidden,
            w_x: &self.data[lay.w_x..lay.w_h],
            w_h: &self.data[lay.w_h..lay.b_x],
            b_x: &self.data[lay.b_x..lay.b_h],
            b_h: &self.data[lay.b_h..lay.end],
        }
    }

    pub fn head_weight(&self) -> &[f64] {
        &self.data[self.head..self.head + self.horizon * self.hidden]
    }

    pub fn head_bias(&self) -> &[f64] {
        &self.data[self.head + self.horizon * self.hidden..]
    }

    pub fn head_bias_mut(&mut self) -> &mut [f64] {
        let start = self.head + self.horizon * self.hidden;
        &mut self.data[start..]
    }

    pub fn head_weight_mut(&mut self) -> &mut [f64] {
        let start = self.head;
        let end = start + self.horizon * self.hidden;
        &mut self.data[start..end]
    }

    /// Mutable access to one gate's blocks: `(w_x, w_h, b_x, b_h)`.
    pub fn gate_mut(&mut self, l: usize, gate: Gate) -> (&mut [f64], &mut [f64], &mut [f64], &mut [f64]) {
        let lay = self.layers[l];
        let h = self.hidden;
        let g = gate.index();
        let (before_wh, rest) = self.data[..lay.end].split_at_mut(lay.w_h);
        let (wh, rest) = rest.split_at_mut(lay.b_x - lay.w_h);
        let (bx, bh) = rest.split_at_mut(lay.b_h - lay.b_x);
        let wx = &mut before_wh[lay.w_x..];
        (
            &mut wx[g * h * lay.in_dim..(g + 1) * h * lay.in_dim],
            &mut wh[g * h * h..(g + 1) * h * h],
            &mut bx[g * h..(g + 1) * h],
            &mut bh[g * h..(g + 1) * h],
        )
    }

    pub fn check_config(&self, config: &LstmConfig) -> Result<()> {
        if self.input_dim != config.input_dim
            || self.hidden != config.hidden_size
            || self.layers.len() != config.num_layers
            || self.horizon != config.horizon
        {
            return Err(Error::ShapeError(format!(
                "parameters are (in {}, hidden {}, layers {}, horizon {}), config is (in {}, hidden {}, layers {}, horizon {})",
                self.input_dim,
                self.hidden,
                self.layers.len(),
                self.horizon,
                config.input_dim,
                config.hidden_size,
                config.num_layers,
                config.horizon
            )));
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
