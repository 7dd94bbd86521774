use std::fmt::Write as _;

use rayon::prelude::*;

use super::LstmConfig;
use crate::error::{Error, Result};
use crate::evaluation::lstm_holdout;
use crate::series::{SplitSpec, TimeSeries};
use crate::textio::fmt_num;

/// Layer counts, dropout rates and hidden sizes to cross.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub layers: Vec<usize>,
    pub dropouts: Vec<f64>,
    pub hidden: Vec<usize>,
}

impl SweepGrid {
    /// One to three layers, dropout 0 / 0.2 / 0.5, hidden 2 / 10 / 20.
    /// Single-layer cells only take dropout 0.
    pub fn standard() -> Self {
        Self {
            layers: vec![1, 2, 3],
            dropouts: vec![0.0, 0.2, 0.5],
            hidden: vec![2, 10, 20],
        }
    }

    pub fn single(layers: usize, dropout: f64, hidden: usize) -> Self {
        Self {
            layers: vec![layers],
            dropouts: vec![dropout],
            hidden: vec![hidden],
        }
    }

    /// `(layers, dropout, hidden)` in table order. Dropout on a single layer
    /// has nothing to act on, so those combinations are left out.
    pub fn cells(&self) -> Vec<(usize, f64, usize)> {
        let mut out = Vec::new();
        for &l in &self.layers {
            for &d in &self.dropouts {
                if l == 1 && d != 0.0 {
                    continue;
                }
                for &h in &self.hidden {
                    out.push((l, d, h));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub layers: usize,
    pub dropout: f64,
    pub hidden: usize,
    /// Mean over traces of the held-out MAE; `None` if the cell failed.
    pub mae: Option<f64>,
    /// Mean over traces with a defined MAPE.
    pub mape: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub traces: usize,
}

/// Trains one network per trace for every grid cell and averages the
/// held-out long-horizon scores. Cell and trace runs are spread over the
/// current rayon pool; a failing trace marks its whole cell failed.
pub fn hyperparameter_sweep(
    traces: &[TimeSeries],
    grid: &SweepGrid,
    base: &LstmConfig,
    split: &SplitSpec,
) -> Result<SweepTable> {
    if traces.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::InvalidConfig("empty sweep grid".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..traces.len()).map(move |t| (c, t)))
        .collect();
    let scores: Vec<Result<(f64, Option<f64>)>> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (layers, dropout, hidden) = cells[c];
            let config = LstmConfig {
                num_layers: layers,
                dropout,
                hidden_size: hidden,
                ..*base
            };
            let scored = lstm_holdout(&traces[t], &config, split)?;
            Ok((scored.long.mae, scored.long.mape))
        })
        .collect();

    let rows = cells
        .iter()
        .enumerate()
        .map(|(c, &(layers, dropout, hidden))| {
            let mut mae = 0.0;
            let mut mape = Vec::new();
            let mut failure = None;
            for result in &scores[c * traces.len()..(c + 1) * traces.len()] {
                match result {
                    Ok((a, b)) => {
                        mae += a;
                        mape.extend(*b);
                    }
                    Err(e) => {
                        failure.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            let ok = failure.is_none();
            SweepRow {
                layers,
                dropout,
                hidden,
                mae: ok.then(|| mae / traces.len() as f64),
                mape: (ok && !mape.is_empty()).then(|| mape.iter().sum::<f64>() / mape.len() as f64),
                failure,
            }
        })
        .collect();
    Ok(SweepTable {
        rows,
        traces: traces.len(),
    })
}

impl SweepTable {
    pub fn row(&self, layers: usize, dropout: f64, hidden: usize) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.layers == layers && r.dropout == dropout && r.hidden == hidden)
    }

    /// Markdown table with one line per grid cell.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| Layers | Hidden Size | Drop Out | MAE | MAPE |");
        let _ = writeln!(out, "|---:|---:|---:|---:|---:|");
        for r in &self.rows {
            let mae = r.mae.map(fmt_num).unwrap_or_else(|| "failed".into());
            let mape = r.mape.map(fmt_num).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| {} | {} | {} | {mae} | {mape} |",
                r.layers, r.hidden, r.dropout
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Scores are held-out sliding-window errors averaged over {} traces.",
            self.traces
        );
        for r in self.rows.iter().filter(|r| r.failure.is_some()) {
            let _ = writeln!(
                out,
                "Cell L={} H={} dropout={} failed: {}",
                r.layers,
                r.hidden,
                r.dropout,
                r.failure.as_deref().unwrap_or_default()
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> LstmConfig {
        LstmConfig {
            max_epochs: 2,
            ..LstmConfig::default()
        }
    }

    fn trace(id: &str) -> TimeSeries {
        let values = (0..200).map(|t| 40.0 + 20.0 * (t as f64 / 6.0).sin()).collect();
        TimeSeries::new(id, 20.0, values).unwrap()
    }

    #[test]
    fn standard_grid_skips_single_layer_dropout() {
        let cells = SweepGrid::standard().cells();
        assert_eq!(cells.len(), 3 + 3 * 3 * 2);
        assert!(cells.iter().all(|(l, d, _)| *l > 1 || *d == 0.0));
    }

    #[test]
    fn one_cell_one_row() {
        let table = hyperparameter_sweep(
            &[trace("a"), trace("b")],
            &SweepGrid::single(1, 0.0, 4),
            &quick(),
            &SplitSpec::default(),
        )
        .unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.rows[0].mae.is_some());
        assert_eq!(table.to_markdown().lines().filter(|l| l.starts_with("| 1 ")).count(), 1);
    }

    #[test]
    fn failing_cell_does_not_abort() {
        let short = TimeSeries::new("tiny", 20.0, vec![1.0; 12]).unwrap();
        let grid = SweepGrid {
            layers: vec![1],
            dropouts: vec![0.0],
            hidden: vec![2, 3],
        };
        let table = hyperparameter_sweep(&[short], &grid, &quick(), &SplitSpec::default()).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows.iter().all(|r| r.mae.is_none() && r.failure.is_some()));
        assert!(table.to_markdown().contains("failed"));
    }
}
