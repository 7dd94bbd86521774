//! Flat `key=value` persistence for fitted models.

use std::fmt::Write as _;
use std::path::Path;

use super::{SarimaModel, SarimaOrder};
use crate::error::{Error, Result};
use crate::textio::{fmt_exact, parse_key_values, write_atomic, KeyValues};

/// Serialises a model. Reals carry 17 significant digits.
pub fn model_to_string(model: &SarimaModel) -> String {
    let o = &model.order;
    let mut out = String::new();
    for (key, value) in [
        ("p", o.p),
        ("d", o.d),
        ("q", o.q),
        ("P", o.seasonal_p),
        ("D", o.seasonal_d),
        ("Q", o.seasonal_q),
        ("m", o.m),
    ] {
        let _ = writeln!(out, "{key}={value}");
    }
    let _ = writeln!(out, "c={}", fmt_exact(model.intercept));
    let _ = writeln!(out, "sigma2={}", fmt_exact(model.noise_variance));
    let _ = writeln!(out, "loglike={}", fmt_exact(model.loglike));
    for (prefix, values) in [
        ("ar", &model.ar),
        ("ma", &model.ma),
        ("sar", &model.seasonal_ar),
        ("sma", &model.seasonal_ma),
        ("tail", &model.tail),
        ("resid", &model.residual_tail),
    ] {
        for (i, v) in values.iter().enumerate() {
            let _ = writeln!(out, "{prefix}.{i}={}", fmt_exact(*v));
        }
    }
    out
}

pub fn save_model(model: &SarimaModel, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &model_to_string(model))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SarimaModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text, path)
}

pub fn parse_model(text: &str, source: &Path) -> Result<SarimaModel> {
    let map = parse_key_values(text, source)?;
    let kv = KeyValues { map: &map, source };
    let order = SarimaOrder::new(
        kv.get("p")?,
        kv.get("d")?,
        kv.get("q")?,
        kv.get("P")?,
        kv.get("D")?,
        kv.get("Q")?,
        kv.get("m")?,
    )?;
    let model = SarimaModel {
        order,
        intercept: kv.get("c")?,
        ar: kv.indexed("ar")?,
        ma: kv.indexed("ma")?,
        seasonal_ar: kv.indexed("sar")?,
        seasonal_ma: kv.indexed("sma")?,
        noise_variance: kv.get("sigma2")?,
        loglike: if map.contains_key("loglike") { kv.get("loglike")? } else { f64::NAN },
        tail: kv.indexed("tail")?,
        residual_tail: kv.indexed("resid")?,
    };
    let shapes = [
        ("ar", model.ar.len(), order.p),
        ("ma", model.ma.len(), order.q),
        ("sar", model.seasonal_ar.len(), order.seasonal_p),
        ("sma", model.seasonal_ma.len(), order.seasonal_q),
    ];
    for (name, found, expected) in shapes {
        if found != expected {
            return Err(Error::ShapeError(format!(
                "{name} has {found} coefficients, order says {expected}"
            )));
        }
    }
    Ok(model)
}
