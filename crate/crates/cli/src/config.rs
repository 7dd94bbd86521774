//! Run configuration: a flat `key = value` file with dotted section prefixes.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use loadcast::evaluation::{ModelSpec, SarimaSpec};
use loadcast::lstm::{LstmConfig, SweepGrid};
use loadcast::sarima::SarimaOrder;
use loadcast::synth::{SuiteSpec, SyntheticKind};
use loadcast::textio::parse_key_values;
use loadcast::{Error, Result, SplitSpec};

pub const DEFAULT_SEED: u64 = 0;

const KNOWN_KEYS: &[&str] = &[
    "inputs",
    "spacing_minutes",
    "resample",
    "window",
    "horizon",
    "short_term_points",
    "test_fraction",
    "models",
    "seed",
    "out",
    "sarima.order",
    "sarima.auto",
    "sarima.max_order",
    "lstm.num_layers",
    "lstm.hidden_size",
    "lstm.dropout",
    "lstm.batch_size",
    "lstm.max_epochs",
    "lstm.learning_rate",
    "sweep.layers",
    "sweep.dropout",
    "sweep.hidden_size",
    "synth.length",
    "synth.period",
    "synth.seasonal",
    "synth.onoff",
    "synth.bursty",
    "synth.noisy",
    "synth.constant",
    "forecast.steps",
    "forecast.model_dir",
];

/// Everything a command needs, after defaults, file and flags are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// CSV files or directories of CSV files. Empty means "use the
    /// synthetic suite".
    pub inputs: Vec<PathBuf>,
    /// Spacing assumed for index-based CSV files.
    pub spacing_minutes: f64,
    pub resample: usize,
    pub split: SplitSpec,
    pub models: Vec<String>,
    /// `None` selects the order by AIC.
    pub sarima_order: Option<SarimaOrder>,
    pub max_order: usize,
    pub lstm: LstmConfig,
    pub sweep: SweepGrid,
    pub suite: SuiteSpec,
    pub forecast_steps: Option<usize>,
    pub model_dir: Option<PathBuf>,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            spacing_minutes: 1.0,
            resample: 20,
            split: SplitSpec::default(),
            models: ["naive_last", "naive_mean", "sarima", "lstm"].map(String::from).to_vec(),
            sarima_order: None,
            max_order: 3,
            lstm: LstmConfig::default(),
            sweep: SweepGrid::standard(),
            suite: SuiteSpec::standard(DEFAULT_SEED),
            forecast_steps: None,
            model_dir: None,
            seed: DEFAULT_SEED,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Contents of `LOADCAST_SEED`, used when neither flag nor file set a seed.
    pub env_seed: Option<String>,
}

fn bad(key: &str, raw: &str) -> Error {
    Error::InvalidConfig(format!("bad value '{raw}' for '{key}'"))
}

fn scalar<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| bad(key, raw))
}

fn list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(key, s))
        .collect()
}

fn flag(key: &str, raw: &str) -> Result<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, raw)),
    }
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, path, base, overrides)
    }

    /// Relative input paths are resolved against `base`.
    pub fn parse(text: &str, source: &Path, base: &Path, overrides: &Overrides) -> Result<Self> {
        let map = parse_key_values(text, source)?;
        if let Some(unknown) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown key '{unknown}'")));
        }
        let mut c = Self::default();
        let get = |key: &str| map.get(key).map(String::as_str);

        if let Some(raw) = get("inputs") {
            c.inputs = raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| base.join(s))
                .collect();
        }
        if let Some(raw) = get("spacing_minutes") {
            c.spacing_minutes = scalar("spacing_minutes", raw)?;
        }
        if let Some(raw) = get("resample") {
            c.resample = scalar("resample", raw)?;
        }
        if let Some(raw) = get("window") {
            c.lstm.window = scalar("window", raw)?;
        }
        if let Some(raw) = get("horizon") {
            c.lstm.horizon = scalar("horizon", raw)?;
        }
        if let Some(raw) = get("short_term_points") {
            c.split.short_term_points = scalar("short_term_points", raw)?;
        }
        if let Some(raw) = get("test_fraction") {
            c.split.test_fraction = scalar("test_fraction", raw)?;
        }
        if let Some(raw) = get("models") {
            c.models = list::<String>("models", raw)?;
            if let Some(m) = c.models.iter().find(|m| !["naive_last", "naive_mean", "sarima", "lstm"].contains(&m.as_str())) {
                return Err(Error::InvalidConfig(format!("unknown model '{m}'")));
            }
        }
        if let Some(raw) = get("sarima.order") {
            let v: Vec<usize> = list("sarima.order", raw)?;
            let [p, d, q, sp, sd, sq] = v[..] else {
                return Err(Error::InvalidConfig(format!(
                    "sarima.order needs p,d,q,P,D,Q, got '{raw}'"
                )));
            };
            // m is filled in per trace from its spacing.
            c.sarima_order = Some(SarimaOrder {
                p,
                d,
                q,
                seasonal_p: sp,
                seasonal_d: sd,
                seasonal_q: sq,
                m: 1,
            });
        }
        if let Some(raw) = get("sarima.auto") {
            if flag("sarima.auto", raw)? {
                c.sarima_order = None;
            } else if c.sarima_order.is_none() {
                c.sarima_order = Some(SarimaOrder::reference(1));
            }
        }
        if let Some(raw) = get("sarima.max_order") {
            c.max_order = scalar("sarima.max_order", raw)?;
        }
        if let Some(raw) = get("lstm.num_layers") {
            c.lstm.num_layers = scalar("lstm.num_layers", raw)?;
        }
        if let Some(raw) = get("lstm.hidden_size") {
            c.lstm.hidden_size = scalar("lstm.hidden_size", raw)?;
        }
        if let Some(raw) = get("lstm.dropout") {
            c.lstm.dropout = scalar("lstm.dropout", raw)?;
        }
        if let Some(raw) = get("lstm.batch_size") {
            c.lstm.batch_size = scalar("lstm.batch_size", raw)?;
        }
        if let Some(raw) = get("lstm.max_epochs") {
            c.lstm.max_epochs = scalar("lstm.max_epochs", raw)?;
        }
        if let Some(raw) = get("lstm.learning_rate") {
            c.lstm.learning_rate = scalar("lstm.learning_rate", raw)?;
        }
        if let Some(raw) = get("sweep.layers") {
            c.sweep.layers = list("sweep.layers", raw)?;
        }
        if let Some(raw) = get("sweep.dropout") {
            c.sweep.dropouts = list("sweep.dropout", raw)?;
        }
        if let Some(raw) = get("sweep.hidden_size") {
            c.sweep.hidden = list("sweep.hidden_size", raw)?;
        }
        if let Some(raw) = get("synth.length") {
            c.suite.length = scalar("synth.length", raw)?;
        }
        if let Some(raw) = get("synth.period") {
            c.suite.period = scalar("synth.period", raw)?;
        }
        let kinds: Vec<(SyntheticKind, Option<&str>)> = SyntheticKind::ALL
            .iter()
            .map(|k| (*k, get(&format!("synth.{}", k.name()))))
            .collect();
        if kinds.iter().any(|(_, v)| v.is_some()) {
            c.suite.counts = kinds
                .into_iter()
                .map(|(k, v)| Ok((k, v.map(|raw| scalar(k.name(), raw)).transpose()?.unwrap_or(0))))
                .collect::<Result<_>>()?;
        }
        if let Some(raw) = get("forecast.steps") {
            c.forecast_steps = Some(scalar("forecast.steps", raw)?);
        }
        if let Some(raw) = get("forecast.model_dir") {
            c.model_dir = Some(base.join(raw));
        }
        if let Some(raw) = get("out") {
            c.out = base.join(raw);
        }

        c.seed = match (overrides.seed, get("seed"), overrides.env_seed.as_deref()) {
            (Some(s), _, _) => s,
            (None, Some(raw), _) => scalar("seed", raw)?,
            (None, None, Some(raw)) => scalar("LOADCAST_SEED", raw.trim())?,
            (None, None, None) => DEFAULT_SEED,
        };
        if let Some(out) = &overrides.out {
            c.out = out.clone();
        }
        c.lstm.seed = c.seed;
        c.suite.seed = c.seed;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resample == 0 {
            return Err(Error::InvalidConfig("resample must be positive".into()));
        }
        if !(self.spacing_minutes.is_finite() && self.spacing_minutes > 0.0) {
            return Err(Error::InvalidSpacing(self.spacing_minutes));
        }
        if !(self.split.test_fraction > 0.0 && self.split.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test_fraction {} not in (0, 1)",
                self.split.test_fraction
            )));
        }
        self.lstm.validate()
    }

    /// Where `fit` writes models and `forecast` reads them.
    pub fn model_dir(&self) -> PathBuf {
        self.model_dir.clone().unwrap_or_else(|| self.out.join("models"))
    }

    /// The contenders named in `models`, with the SARIMA season length set
    /// to `m`.
    pub fn model_specs(&self, m: usize) -> Vec<ModelSpec> {
        self.models
            .iter()
            .map(|name| match name.as_str() {
                "naive_last" => ModelSpec::NaiveLast,
                "naive_mean" => ModelSpec::NaiveMean,
                "sarima" => ModelSpec::Sarima(self.sarima_spec(m)),
                _ => ModelSpec::Lstm(self.lstm),
            })
            .collect()
    }

    pub fn sarima_spec(&self, m: usize) -> SarimaSpec {
        match self.sarima_order {
            Some(order) => SarimaSpec::Fixed(with_season(order, m)),
            None => SarimaSpec::Auto {
                max_order: self.max_order,
            },
        }
    }
}

/// Sets the season length, dropping seasonal terms when `m < 2`.
pub fn with_season(order: SarimaOrder, m: usize) -> SarimaOrder {
    if m < 2 {
        SarimaOrder {
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            m: 1,
            ..order
        }
    } else {
        SarimaOrder { m, ..order }
    }
}
