use std::fmt::Write as _;

use super::harness::{Aggregate, ColumnStats, EvalReport, Horizon, Overlay};
use crate::textio::fmt_num;

const ASYMMETRY_NOTE: &str = "Long-horizon SARIMA and naive scores compare one forecast path against the \
whole test segment. Long-horizon LSTM scores pool every sliding window inside the test segment, each \
forecasting `horizon` points from observed inputs.";

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

impl EvalReport {
    /// `trace,model,horizon,mae,mape,rmse,n,mape_excluded`; metric fields
    /// are empty for failed cells and MAPE is empty when undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trace,model,horizon,mae,mape,rmse,n,mape_excluded\n");
        for r in &self.rows {
            match &r.metrics {
                Ok(m) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.trace,
                        r.model,
                        r.horizon.name(),
                        fmt_num(m.mae),
                        opt(m.mape),
                        fmt_num(m.rmse),
                        m.n,
                        m.mape_excluded
                    );
                }
                Err(_) => {
                    let _ = writeln!(out, "{},{},{},,,,,", r.trace, r.model, r.horizon.name());
                }
            }
        }
        out
    }

    /// Summary table, one per-trace table for every (model, horizon) with
    /// Average/Maximum/Minimum footers, and win rates.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "## Average accuracy\n");
        let _ = writeln!(out, "| Model | Horizon | MAE | MAPE | RMSE | Failed |");
        let _ = writeln!(out, "|---|---|---:|---:|---:|---:|");
        for a in &self.aggregates {
            let avg = |c: Option<ColumnStats>| opt(c.map(|c| c.average));
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                a.model,
                a.horizon.name(),
                avg(a.mae),
                avg(a.mape),
                avg(a.rmse),
                a.failures
            );
        }

        for a in &self.aggregates {
            self.write_detail(&mut out, a);
        }

        if !self.win_rates.is_empty() {
            let _ = writeln!(out, "\n## Win rates\n");
            let _ = writeln!(out, "| Model | Baseline | Horizon | Metric | Win rate | Traces |");
            let _ = writeln!(out, "|---|---|---|---|---:|---:|");
            for w in &self.win_rates {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    w.model,
                    w.baseline,
                    w.horizon.name(),
                    w.metric.name(),
                    fmt_num(w.rate),
                    w.compared
                );
            }
        }
        let _ = writeln!(out, "\n{ASYMMETRY_NOTE}");
        let excluded: usize = self
            .rows
            .iter()
            .filter_map(|r| r.metrics.as_ref().ok())
            .map(|m| m.mape_excluded)
            .sum();
        let _ = writeln!(
            out,
            "MAPE is a ratio and skips zero actuals ({excluded} points skipped in total)."
        );
        out
    }

    fn write_detail(&self, out: &mut String, a: &Aggregate) {
        let _ = writeln!(out, "\n## {} ({})\n", a.model, a.horizon.name());
        let _ = writeln!(out, "| Trace | MAE | MAPE | RMSE |");
        let _ = writeln!(out, "|---|---:|---:|---:|");
        for r in self
            .rows
            .iter()
            .filter(|r| r.model == a.model && r.horizon == a.horizon)
        {
            match &r.metrics {
                Ok(m) => {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} |",
                        r.trace,
                        fmt_num(m.mae),
                        opt(m.mape),
                        fmt_num(m.rmse)
                    );
                }
                Err(e) => {
                    let _ = writeln!(out, "| {} | failed: {} | | |", r.trace, e.replace('|', "/"));
                }
            }
        }
        type Pick = fn(&ColumnStats) -> f64;
        let footers: [(&str, Pick); 3] = [
            ("Average", |c| c.average),
            ("Maximum", |c| c.maximum),
            ("Minimum", |c| c.minimum),
        ];
        for (label, pick) in footers {
            let cell = |c: Option<ColumnStats>| opt(c.as_ref().map(pick));
            let _ = writeln!(
                out,
                "| **{label}** | {} | {} | {} |",
                cell(a.mae),
                cell(a.mape),
                cell(a.rmse)
            );
        }
    }
}

impl Overlay {
    /// `t,actual,predicted`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,actual,predicted\n");
        for (t, a, p) in &self.points {
            let _ = writeln!(out, "{t},{},{}", fmt_num(*a), fmt_num(*p));
        }
        out
    }
}

impl Horizon {
    pub const BOTH: [Horizon; 2] = [Horizon::Long, Horizon::Short];
}
