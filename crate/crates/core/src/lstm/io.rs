//! Flat `key=value` persistence for trained networks.
//!
//! The file starts with a `config.*` block, then one line per weight:
//! `layer.<l>.<gate>.wx.<row>.<col>`, `layer.<l>.<gate>.wh.<row>.<col>`,
//! `layer.<l>.<gate>.bx.<row>`, `layer.<l>.<gate>.bh.<row>`, and the head as
//! `head.w.<row>.<col>` / `head.b.<row>`.

use std::fmt::Write as _;
use std::path::Path;

use super::{Gate, LstmConfig, LstmParams};
use crate::error::{Error, Result};
use crate::textio::{fmt_exact, parse_key_values, write_atomic, KeyValues};

fn weight_keys(params: &LstmParams) -> Vec<(String, usize)> {
    let h = params.hidden;
    let mut keys = Vec::with_capacity(params.len());
    for (l, lay) in params.layers.iter().enumerate() {
        for gate in Gate::ALL {
            let g = gate.index();
            let name = gate.name();
            for r in 0..h {
                let row = g * h + r;
                for c in 0..lay.in_dim {
                    keys.push((format!("layer.{l}.{name}.wx.{r}.{c}"), lay.w_x + row * lay.in_dim + c));
                }
                for c in 0..h {
                    keys.push((format!("layer.{l}.{name}.wh.{r}.{c}"), lay.w_h + row * h + c));
                }
                keys.push((format!("layer.{l}.{name}.bx.{r}"), lay.b_x + row));
                keys.push((format!("layer.{l}.{name}.bh.{r}"), lay.b_h + row));
            }
        }
    }
    for r in 0..params.horizon {
        for c in 0..h {
            keys.push((format!("head.w.{r}.{c}"), params.head + r * h + c));
        }
    }
    for r in 0..params.horizon {
        keys.push((format!("head.b.{r}"), params.head + params.horizon * h + r));
    }
    keys
}

pub fn params_to_string(params: &LstmParams, config: &LstmConfig) -> Result<String> {
    params.check_config(config)?;
    let mut out = String::new();
    let _ = writeln!(out, "config.input_dim={}", config.input_dim);
    let _ = writeln!(out, "config.hidden_size={}", config.hidden_size);
    let _ = writeln!(out, "config.num_layers={}", config.num_layers);
    let _ = writeln!(out, "config.dropout={}", fmt_exact(config.dropout));
    let _ = writeln!(out, "config.horizon={}", config.horizon);
    let _ = writeln!(out, "config.window={}", config.window);
    let _ = writeln!(out, "config.batch_size={}", config.batch_size);
    let _ = writeln!(out, "config.max_epochs={}", config.max_epochs);
    let _ = writeln!(out, "config.learning_rate={}", fmt_exact(config.learning_rate));
    let _ = writeln!(out, "config.seed={}", config.seed);
    for (key, k) in weight_keys(params) {
        let _ = writeln!(out, "{key}={}", fmt_exact(params.data[k]));
    }
    Ok(out)
}

pub fn save_params(params: &LstmParams, config: &LstmConfig, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &params_to_string(params, config)?)
}

pub fn load_params(path: impl AsRef<Path>) -> Result<(LstmParams, LstmConfig)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_params(&text, path)
}

pub fn parse_params(text: &str, source: &Path) -> Result<(LstmParams, LstmConfig)> {
    let map = parse_key_values(text, source)?;
    let kv = KeyValues { map: &map, source };
    let config = LstmConfig {
        input_dim: kv.get("config.input_dim")?,
        hidden_size: kv.get("config.hidden_size")?,
        num_layers: kv.get("config.num_layers")?,
        dropout: kv.get("config.dropout")?,
        horizon: kv.get("config.horizon")?,
        window: kv.get("config.window")?,
        batch_size: kv.get("config.batch_size")?,
        max_epochs: kv.get("config.max_epochs")?,
        learning_rate: kv.get("config.learning_rate")?,
        seed: kv.get("config.seed")?,
    };
    config.validate()?;
    let mut params = LstmParams::zeros(&config);
    for (key, k) in weight_keys(&params) {
        params.data[k] = kv.get(&key)?;
    }
    Ok((params, config))
}
