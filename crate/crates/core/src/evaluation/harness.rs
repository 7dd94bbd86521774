use rayon::prelude::*;

use super::metrics::{naive_last, naive_mean, MetricSet};
use crate::error::{Error, Result};
use crate::lstm::{predict, train_series, LstmConfig};
use crate::sarima::{auto_tune, fit, forecast, season_length, SarimaOrder};
use crate::series::{sliding_windows, split, SplitSpec, TimeSeries};

/// How the SARIMA contender picks its order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SarimaSpec {
    Fixed(SarimaOrder),
    /// AIC grid search up to this order, with `m` taken from the spacing.
    Auto { max_order: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    NaiveLast,
    NaiveMean,
    Sarima(SarimaSpec),
    Lstm(LstmConfig),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::NaiveLast => "naive_last",
            ModelSpec::NaiveMean => "naive_mean",
            ModelSpec::Sarima(_) => "sarima",
            ModelSpec::Lstm(_) => "lstm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Horizon {
    Long,
    Short,
}

impl Horizon {
    pub fn name(self) -> &'static str {
        match self {
            Horizon::Long => "long",
            Horizon::Short => "short",
        }
    }
}

/// Predictions and actuals for both horizons of one (trace, model) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellForecast {
    pub short_pred: Vec<f64>,
    pub short_actual: Vec<f64>,
    pub long_pred: Vec<f64>,
    pub long_actual: Vec<f64>,
    /// `(t, actual, predicted)` over the long test segment, one point per
    /// step; `t` indexes the full trace.
    pub overlay: Vec<(usize, f64, f64)>,
}

impl CellForecast {
    fn from_path(pred: Vec<f64>, train_len: usize, long_actual: &[f64], short_len: usize) -> Self {
        Self {
            short_pred: pred[..short_len].to_vec(),
            short_actual: long_actual[..short_len].to_vec(),
            overlay: long_actual
                .iter()
                .zip(&pred)
                .enumerate()
                .map(|(k, (a, p))| (train_len + k, *a, *p))
                .collect(),
            long_actual: long_actual.to_vec(),
            long_pred: pred,
        }
    }

    pub fn score(&self, horizon: Horizon) -> Result<MetricSet> {
        match horizon {
            Horizon::Short => MetricSet::score(&self.short_pred, &self.short_actual),
            Horizon::Long => MetricSet::score(&self.long_pred, &self.long_actual),
        }
    }
}

/// Scores of an LSTM trained on the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmHoldout {
    pub short: MetricSet,
    pub long: MetricSet,
    pub forecast: CellForecast,
}

/// Trains on the windows of the training split. The short horizon is one
/// forecast from the last training window; the long horizon pools every
/// sliding window lying wholly inside the test segment.
pub fn lstm_holdout(series: &TimeSeries, config: &LstmConfig, spec: &SplitSpec) -> Result<LstmHoldout> {
    let forecast = lstm_forecast(series, config, spec)?;
    Ok(LstmHoldout {
        short: forecast.score(Horizon::Short)?,
        long: forecast.score(Horizon::Long)?,
        forecast,
    })
}

fn lstm_forecast(series: &TimeSeries, config: &LstmConfig, spec: &SplitSpec) -> Result<CellForecast> {
    let parts = split(series, spec)?;
    let (params, _) = train_series(&parts.train, config)?;
    let train_len = parts.train.len();

    let last = parts.train.values()[train_len - config.window..].to_vec();
    let short = predict(&params, config, &[last])?.remove(0);
    let k = short.len().min(parts.short_test.len());

    let windows = sliding_windows(&parts.long_test, config.window, config.horizon)?;
    let inputs: Vec<Vec<f64>> = windows.pairs.iter().map(|p| p.input.clone()).collect();
    let outputs = predict(&params, config, &inputs)?;
    let mut long_pred = Vec::with_capacity(outputs.len() * config.horizon);
    let mut long_actual = Vec::with_capacity(outputs.len() * config.horizon);
    let mut overlay = Vec::with_capacity(outputs.len());
    for (pair, out) in windows.pairs.iter().zip(&outputs) {
        long_pred.extend(out);
        long_actual.extend(&pair.target);
        overlay.push((train_len + pair.start + config.window, pair.target[0], out[0]));
    }
    Ok(CellForecast {
        short_pred: short[..k].to_vec(),
        short_actual: parts.short_test.values()[..k].to_vec(),
        long_pred,
        long_actual,
        overlay,
    })
}

/// Runs one model on one trace.
pub fn run_model(series: &TimeSeries, model: &ModelSpec, spec: &SplitSpec) -> Result<CellForecast> {
    if let ModelSpec::Lstm(config) = model {
        return lstm_forecast(series, config, spec);
    }
    let parts = split(series, spec)?;
    let steps = parts.long_test.len();
    let pred = match model {
        ModelSpec::NaiveLast => naive_last(&parts.train, steps),
        ModelSpec::NaiveMean => naive_mean(&parts.train, steps),
        ModelSpec::Sarima(SarimaSpec::Fixed(order)) => forecast(&fit(&parts.train, *order)?, steps)?,
        ModelSpec::Sarima(SarimaSpec::Auto { max_order }) => {
            let m = season_length(series.spacing_minutes())?;
            let (_, model) = auto_tune(&parts.train, *max_order, m)?;
            forecast(&model, steps)?
        }
        ModelSpec::Lstm(_) => unreachable!(),
    };
    Ok(CellForecast::from_path(
        pred,
        parts.train.len(),
        parts.long_test.values(),
        parts.short_test.len(),
    ))
}

/// One scored cell. Failures carry the error text.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub trace: String,
    pub model: String,
    pub horizon: Horizon,
    pub metrics: std::result::Result<MetricSet, String>,
}

/// Overlay points for one (trace, model) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub trace: String,
    pub model: String,
    pub points: Vec<(usize, f64, f64)>,
}

/// Which column a win rate compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mae,
    Mape,
    Rmse,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Mae, Metric::Mape, Metric::Rmse];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "MAE",
            Metric::Mape => "MAPE",
            Metric::Rmse => "RMSE",
        }
    }

    pub fn of(self, m: &MetricSet) -> Option<f64> {
        match self {
            Metric::Mae => Some(m.mae),
            Metric::Mape => m.mape,
            Metric::Rmse => Some(m.rmse),
        }
    }
}

/// Average, maximum and minimum of one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub average: f64,
    pub maximum: f64,
    pub minimum: f64,
    pub count: usize,
}

impl ColumnStats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Self {
            average: values.iter().sum::<f64>() / values.len() as f64,
            maximum: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            minimum: values.iter().cloned().fold(f64::INFINITY, f64::min),
            count: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub model: String,
    pub horizon: Horizon,
    pub mae: Option<ColumnStats>,
    pub mape: Option<ColumnStats>,
    pub rmse: Option<ColumnStats>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WinRate {
    pub model: String,
    pub baseline: String,
    pub horizon: Horizon,
    pub metric: Metric,
    /// Fraction of compared traces where the model is strictly better.
    pub rate: f64,
    pub compared: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Sorted by trace id, model name, horizon.
    pub rows: Vec<EvalRow>,
    pub aggregates: Vec<Aggregate>,
    pub win_rates: Vec<WinRate>,
    pub overlays: Vec<Overlay>,
}

/// Scores every model on every trace at both horizons. Cells run in
/// parallel; a failing cell is recorded and the run carries on.
pub fn compare(traces: &[TimeSeries], models: &[ModelSpec], spec: &SplitSpec) -> Result<EvalReport> {
    if traces.is_empty() || models.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let cells: Vec<(usize, usize)> = (0..traces.len())
        .flat_map(|t| (0..models.len()).map(move |m| (t, m)))
        .collect();
    let outcomes: Vec<Result<CellForecast>> = cells
        .par_iter()
        .map(|&(t, m)| run_model(&traces[t], &models[m], spec))
        .collect();

    let mut rows = Vec::with_capacity(cells.len() * 2);
    let mut overlays = Vec::new();
    for (&(t, m), outcome) in cells.iter().zip(outcomes) {
        let trace = traces[t].id().to_string();
        let model = models[m].name().to_string();
        for horizon in [Horizon::Long, Horizon::Short] {
            let metrics = match &outcome {
                Ok(cell) => cell.score(horizon).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            rows.push(EvalRow {
                trace: trace.clone(),
                model: model.clone(),
                horizon,
                metrics,
            });
        }
        if let Ok(cell) = outcome {
            overlays.push(Overlay {
                trace,
                model,
                points: cell.overlay,
            });
        }
    }
    Ok(EvalReport::from_rows(rows, overlays))
}

impl EvalReport {
    /// Sorts the rows and derives aggregates and win rates from them.
    pub fn from_rows(mut rows: Vec<EvalRow>, mut overlays: Vec<Overlay>) -> Self {
        rows.sort_by(|a, b| (&a.trace, &a.model, a.horizon).cmp(&(&b.trace, &b.model, b.horizon)));
        overlays.sort_by(|a, b| (&a.trace, &a.model).cmp(&(&b.trace, &b.model)));
        let mut models: Vec<String> = rows.iter().map(|r| r.model.clone()).collect();
        models.sort();
        models.dedup();

        let mut aggregates = Vec::new();
        for model in &models {
            for horizon in [Horizon::Long, Horizon::Short] {
                let cells: Vec<&EvalRow> = rows
                    .iter()
                    .filter(|r| &r.model == model && r.horizon == horizon)
                    .collect();
                if cells.is_empty() {
                    continue;
                }
                let ok: Vec<&MetricSet> = cells.iter().filter_map(|r| r.metrics.as_ref().ok()).collect();
                let column = |metric: Metric| {
                    ColumnStats::of(&ok.iter().filter_map(|m| metric.of(m)).collect::<Vec<_>>())
                };
                aggregates.push(Aggregate {
                    model: model.clone(),
                    horizon,
                    mae: column(Metric::Mae),
                    mape: column(Metric::Mape),
                    rmse: column(Metric::Rmse),
                    failures: cells.len() - ok.len(),
                });
            }
        }

        let mut report = Self {
            rows,
            aggregates,
            win_rates: Vec::new(),
            overlays,
        };
        let mut win_rates = Vec::new();
        for model in &models {
            for baseline in &models {
                if model == baseline {
                    continue;
                }
                for horizon in [Horizon::Long, Horizon::Short] {
                    for metric in Metric::ALL {
                        if let Some((rate, compared)) = report.win_rate(model, baseline, horizon, metric) {
                            win_rates.push(WinRate {
                                model: model.clone(),
                                baseline: baseline.clone(),
                                horizon,
                                metric,
                                rate,
                                compared,
                            });
                        }
                    }
                }
            }
        }
        report.win_rates = win_rates;
        report
    }

    pub fn metrics(&self, trace: &str, model: &str, horizon: Horizon) -> Option<&MetricSet> {
        self.rows
            .iter()
            .find(|r| r.trace == trace && r.model == model && r.horizon == horizon)
            .and_then(|r| r.metrics.as_ref().ok())
    }

    pub fn aggregate(&self, model: &str, horizon: Horizon) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.model == model && a.horizon == horizon)
    }

    /// Fraction of traces, among those where both cells have the metric,
    /// on which `model` is strictly below `baseline`. Ties are losses.
    pub fn win_rate(&self, model: &str, baseline: &str, horizon: Horizon, metric: Metric) -> Option<(f64, usize)> {
        let mut traces: Vec<&str> = self.rows.iter().map(|r| r.trace.as_str()).collect();
        traces.dedup();
        let mut wins = 0;
        let mut compared = 0;
        for trace in traces {
            let a = self.metrics(trace, model, horizon).and_then(|m| metric.of(m));
            let b = self.metrics(trace, baseline, horizon).and_then(|m| metric.of(m));
            if let (Some(a), Some(b)) = (a, b) {
                compared += 1;
                if a < b {
                    wins += 1;
                }
            }
        }
        (compared > 0).then(|| (wins as f64 / compared as f64, compared))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(id: &str, values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(id, 20.0, values).unwrap()
    }

    #[test]
    fn single_cell_aggregates_equal_row() {
        let t = trace("a", (0..50).map(|v| v as f64).collect());
        let r = compare(&[t], &[ModelSpec::NaiveLast], &SplitSpec::default()).unwrap();
        assert_eq!(r.rows.len(), 2);
        let row = r.metrics("a", "naive_last", Horizon::Long).unwrap();
        let agg = r.aggregate("naive_last", Horizon::Long).unwrap();
        let mae = agg.mae.unwrap();
        assert_eq!((mae.average, mae.maximum, mae.minimum), (row.mae, row.mae, row.mae));
        // train ends at 39; test is 40..49
        assert_eq!(row.mae, 5.5);
        assert_eq!(r.metrics("a", "naive_last", Horizon::Short).unwrap().mae, 2.0);
    }

    #[test]
    fn self_win_rate_is_zero() {
        let t = trace("a", (0..50).map(|v| (v % 7) as f64).collect());
        let r = compare(&[t], &[ModelSpec::NaiveMean], &SplitSpec::default()).unwrap();
        assert_eq!(r.win_rate("naive_mean", "naive_mean", Horizon::Long, Metric::Mae), Some((0.0, 1)));
        assert!(r.win_rates.is_empty());
    }

    #[test]
    fn failures_are_recorded() {
        let tiny = trace("tiny", vec![5.0; 20]);
        let ok = trace("ok", (0..100).map(|v| (v % 10) as f64 * 3.0).collect());
        let models = [
            ModelSpec::NaiveMean,
            ModelSpec::Sarima(SarimaSpec::Fixed(SarimaOrder::arma(3, 3))),
        ];
        let r = compare(&[tiny, ok], &models, &SplitSpec::default()).unwrap();
        assert_eq!(r.rows.len(), 8);
        let bad = r
            .rows
            .iter()
            .find(|x| x.trace == "tiny" && x.model == "sarima")
            .unwrap();
        assert!(bad.metrics.is_err());
        assert_eq!(r.aggregate("sarima", Horizon::Long).unwrap().failures, 1);
        let order: Vec<(&str, &str, Horizon)> = r
            .rows
            .iter()
            .map(|x| (x.trace.as_str(), x.model.as_str(), x.horizon))
            .collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn win_rate_counts_strict_wins() {
        let mk = |trace: &str, model: &str, mae: f64| EvalRow {
            trace: trace.into(),
            model: model.into(),
            horizon: Horizon::Long,
            metrics: Ok(MetricSet {
                mae,
                mape: None,
                rmse: mae,
                n: 1,
                mape_excluded: 1,
            }),
        };
        let rows = vec![
            mk("a", "x", 1.0),
            mk("a", "y", 2.0),
            mk("b", "x", 2.0),
            mk("b", "y", 2.0),
            mk("c", "x", 3.0),
            mk("c", "y", 2.0),
            mk("d", "x", 0.5),
            mk("d", "y", 2.0),
        ];
        let r = EvalReport::from_rows(rows, vec![]);
        assert_eq!(r.win_rate("x", "y", Horizon::Long, Metric::Mae), Some((0.5, 4)));
        assert_eq!(r.win_rate("y", "x", Horizon::Long, Metric::Mae), Some((0.25, 4)));
        assert_eq!(r.win_rate("x", "y", Horizon::Long, Metric::Mape), None);
    }

    #[test]
    fn lstm_cell_shapes() {
        let values: Vec<f64> = (0..300).map(|t| 50.0 + 20.0 * (t as f64 / 5.0).sin()).collect();
        let t = trace("s", values);
        let c = LstmConfig {
            hidden_size: 4,
            num_layers: 1,
            max_epochs: 2,
            ..LstmConfig::default()
        };
        let cell = run_model(&t, &ModelSpec::Lstm(c), &SplitSpec::default()).unwrap();
        assert_eq!(cell.short_pred.len(), 3);
        // 60 test points → 52 windows of 3
        assert_eq!(cell.long_pred.len(), 52 * 3);
        assert_eq!(cell.overlay.len(), 52);
        assert_eq!(cell.overlay[0].0, 240 + 6);
        assert_eq!(cell.short_actual, t.values()[240..243].to_vec());
    }
}
