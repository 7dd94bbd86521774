use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use loadcast::diagnostics::{collection_stats, decompose, kpss_level, population_std};
use loadcast::evaluation::{compare, EvalReport};
use loadcast::lstm::{hyperparameter_sweep, load_params, predict, save_params, train_series};
use loadcast::sarima::{aic, auto_tune, fit, forecast, load_model, save_model, season_length};
use loadcast::series::{load_csv_with_index_spacing, resample_mean, split};
use loadcast::synth::generate_suite;
use loadcast::textio::{fmt_num, write_atomic};
use loadcast::{Error, Result, TimeSeries};

use crate::config::{with_season, RunConfig};

fn warn(what: &str, err: &dyn std::fmt::Display) {
    eprintln!("warning: {what}: {err}");
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    Ok(files)
}

/// Loads and resamples every input, or generates the synthetic suite when
/// no inputs are configured. Unreadable traces are reported and skipped.
pub fn load_traces(config: &RunConfig) -> Result<Vec<TimeSeries>> {
    let mut raw = Vec::new();
    if config.inputs.is_empty() {
        raw.extend(generate_suite(&config.suite)?.into_iter().map(|(_, s)| s));
    } else {
        let mut files = Vec::new();
        for input in &config.inputs {
            if input.is_dir() {
                files.extend(csv_files(input)?);
            } else {
                files.push(input.clone());
            }
        }
        for file in files {
            match load_csv_with_index_spacing(&file, config.spacing_minutes) {
                Ok(s) => raw.push(s),
                Err(e) => warn(&file.display().to_string(), &e),
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for s in raw {
        if !seen.insert(s.id().to_string()) {
            warn(s.id(), &"duplicate trace id, skipped");
            continue;
        }
        match resample_mean(&s, config.resample) {
            Ok(r) => out.push(r),
            Err(e) => warn(s.id(), &e),
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyCollection);
    }
    Ok(out)
}

/// Points per day, or 1 when the spacing does not divide a day.
fn season_of(series: &TimeSeries) -> usize {
    season_length(series.spacing_minutes()).unwrap_or(1)
}

pub fn analyze(config: &RunConfig) -> Result<()> {
    let traces = load_traces(config)?;
    let dir = config.out.join("analysis");
    ensure_dir(&dir)?;
    let mut summary = String::from("trace,n,mean,std,kpss_statistic,kpss_lag,stationary_5pct,period\n");
    for s in &traces {
        let period = season_of(s);
        let (stat, lag, stationary) = match kpss_level(s, None) {
            Ok(k) => (fmt_num(k.statistic), k.lag_truncation.to_string(), k.stationary_at_5pct.to_string()),
            Err(Error::DegenerateSeries) => ("degenerate".into(), String::new(), String::new()),
            Err(e) => {
                warn(s.id(), &e);
                (String::new(), String::new(), String::new())
            }
        };
        let _ = writeln!(
            summary,
            "{},{},{},{},{stat},{lag},{stationary},{period}",
            s.id(),
            s.len(),
            fmt_num(s.mean()),
            fmt_num(population_std(s.values()))
        );
        match decompose(s, period) {
            Ok(d) => write_atomic(dir.join(format!("{}.decomposition.csv", s.id())), &d.to_csv(s.values()))?,
            Err(e) => warn(&format!("{} decomposition", s.id()), &e),
        }
    }
    let stats = collection_stats(&traces)?;
    let stds: Vec<f64> = stats.per_trace_std.values().copied().collect();
    let _ = writeln!(
        summary,
        "_average,,{},{},,,,",
        fmt_num(stats.mean_of_means),
        fmt_num(stds.iter().sum::<f64>() / stds.len() as f64)
    );
    let _ = writeln!(
        summary,
        "_std,,{},{},,,,",
        fmt_num(stats.std_of_means),
        fmt_num(stats.std_of_stds)
    );
    write_atomic(dir.join("summary.csv"), &summary)?;
    eprintln!("analyzed {} traces into {}", traces.len(), dir.display());
    Ok(())
}

pub fn bench(config: &RunConfig) -> Result<()> {
    let traces = load_traces(config)?;
    // Traces sharing a spacing share a season length.
    let mut groups: BTreeMap<u64, Vec<TimeSeries>> = BTreeMap::new();
    for s in traces {
        groups.entry(s.spacing_minutes().to_bits()).or_default().push(s);
    }
    let mut rows = Vec::new();
    let mut overlays = Vec::new();
    for group in groups.values() {
        let models = config.model_specs(season_of(&group[0]));
        let report = compare(group, &models, &config.split)?;
        rows.extend(report.rows);
        overlays.extend(report.overlays);
    }
    let report = EvalReport::from_rows(rows, overlays);
    for r in report.rows.iter() {
        if let Err(e) = &r.metrics {
            warn(&format!("{} {} {}", r.trace, r.model, r.horizon.name()), e);
        }
    }
    ensure_dir(&config.out)?;
    write_atomic(config.out.join("report.csv"), &report.to_csv())?;
    write_atomic(config.out.join("report.md"), &report.to_markdown())?;
    let overlay_dir = config.out.join("overlays");
    ensure_dir(&overlay_dir)?;
    for o in &report.overlays {
        write_atomic(overlay_dir.join(format!("{}.{}.csv", o.trace, o.model)), &o.to_csv())?;
    }
    eprintln!("wrote {} report rows to {}", report.rows.len(), config.out.display());
    Ok(())
}

pub fn tune(config: &RunConfig) -> Result<()> {
    let traces = load_traces(config)?;
    let dir = config.out.join("tune");
    ensure_dir(&dir)?;
    let mut orders = String::from("trace,p,d,q,P,D,Q,m,aic\n");
    for s in &traces {
        let chosen = split(s, &config.split).and_then(|parts| auto_tune(&parts.train, config.max_order, season_of(s)));
        match chosen {
            Ok((o, model)) => {
                let _ = writeln!(
                    orders,
                    "{},{},{},{},{},{},{},{},{}",
                    s.id(),
                    o.p,
                    o.d,
                    o.q,
                    o.seasonal_p,
                    o.seasonal_d,
                    o.seasonal_q,
                    o.m,
                    fmt_num(aic(&model))
                );
            }
            Err(e) => {
                warn(s.id(), &e);
                let _ = writeln!(orders, "{},,,,,,,,", s.id());
            }
        }
    }
    write_atomic(dir.join("sarima_orders.csv"), &orders)?;

    let table = hyperparameter_sweep(&traces, &config.sweep, &config.lstm, &config.split)?;
    let mut csv = String::from("layers,hidden_size,dropout,mae,mape,failed\n");
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.layers,
            r.hidden,
            r.dropout,
            r.mae.map(fmt_num).unwrap_or_default(),
            r.mape.map(fmt_num).unwrap_or_default(),
            r.failure.is_some()
        );
    }
    write_atomic(dir.join("lstm_sweep.csv"), &csv)?;
    write_atomic(dir.join("lstm_sweep.md"), &table.to_markdown())?;
    eprintln!("tuned {} traces into {}", traces.len(), dir.display());
    Ok(())
}

pub fn synth(config: &RunConfig) -> Result<()> {
    let dir = config.out.join("traces");
    ensure_dir(&dir)?;
    let suite = generate_suite(&config.suite)?;
    for (_, s) in &suite {
        write_atomic(dir.join(format!("{}.csv", s.id())), &s.to_csv())?;
    }
    eprintln!("wrote {} traces to {}", suite.len(), dir.display());
    Ok(())
}

fn wants(config: &RunConfig, model: &str) -> bool {
    config.models.iter().any(|m| m == model)
}

/// Fits the configured models on each whole trace and saves them.
pub fn fit_models(config: &RunConfig) -> Result<()> {
    let traces = load_traces(config)?;
    let dir = config.model_dir();
    ensure_dir(&dir)?;
    let mut summary = String::from("trace,model,detail,score\n");
    for s in &traces {
        if wants(config, "sarima") {
            let m = season_of(s);
            let fitted = match config.sarima_order {
                Some(order) => fit(s, with_season(order, m)),
                None => auto_tune(s, config.max_order, m).map(|(_, model)| model),
            };
            match fitted {
                Ok(model) => {
                    save_model(&model, dir.join(format!("{}.sarima.model", s.id())))?;
                    let _ = writeln!(summary, "{},sarima,{},{}", s.id(), model.order, fmt_num(aic(&model)));
                }
                Err(e) => warn(&format!("{} sarima", s.id()), &e),
            }
        }
        if wants(config, "lstm") {
            match train_series(s, &config.lstm) {
                Ok((params, report)) => {
                    save_params(&params, &config.lstm, dir.join(format!("{}.lstm.model", s.id())))?;
                    let _ = writeln!(
                        summary,
                        "{},lstm,L{}-H{},{}",
                        s.id(),
                        config.lstm.num_layers,
                        config.lstm.hidden_size,
                        fmt_num(report.final_loss())
                    );
                }
                Err(e) => warn(&format!("{} lstm", s.id()), &e),
            }
        }
    }
    write_atomic(dir.join("fit_summary.csv"), &summary)?;
    eprintln!("fitted {} traces into {}", traces.len(), dir.display());
    Ok(())
}

fn path_csv(start: usize, values: &[f64]) -> String {
    let mut out = String::from("t,value\n");
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", start + k, fmt_num(*v));
    }
    out
}

/// Forecasts past the end of each trace with the saved models.
pub fn forecast_traces(config: &RunConfig) -> Result<()> {
    let traces = load_traces(config)?;
    let models = config.model_dir();
    let dir = config.out.join("forecasts");
    ensure_dir(&dir)?;
    let mut written = 0;
    for s in &traces {
        let steps = config.forecast_steps.unwrap_or_else(|| config.split.long_len(s.len()).max(1));
        let sarima_path = models.join(format!("{}.sarima.model", s.id()));
        if wants(config, "sarima") && sarima_path.exists() {
            match load_model(&sarima_path).and_then(|m| forecast(&m, steps)) {
                Ok(path) => {
                    write_atomic(dir.join(format!("{}.sarima.csv", s.id())), &path_csv(s.len(), &path))?;
                    written += 1;
                }
                Err(e) => warn(&format!("{} sarima", s.id()), &e),
            }
        }
        let lstm_path = models.join(format!("{}.lstm.model", s.id()));
        if wants(config, "lstm") && lstm_path.exists() {
            let result = load_params(&lstm_path).and_then(|(params, lstm)| {
                if s.len() < lstm.window {
                    return Err(Error::InsufficientData {
                        required: lstm.window,
                        actual: s.len(),
                    });
                }
                let input = s.values()[s.len() - lstm.window..].to_vec();
                let out = predict(&params, &lstm, &[input])?.remove(0);
                Ok(out.into_iter().map(|v| v.clamp(0.0, 100.0)).collect::<Vec<_>>())
            });
            match result {
                Ok(path) => {
                    write_atomic(dir.join(format!("{}.lstm.csv", s.id())), &path_csv(s.len(), &path))?;
                    written += 1;
                }
                Err(e) => warn(&format!("{} lstm", s.id()), &e),
            }
        }
    }
    if written == 0 {
        return Err(Error::InvalidConfig(format!(
            "no saved models found in {}",
            models.display()
        )));
    }
    eprintln!("wrote {written} forecasts to {}", dir.display());
    Ok(())
}
