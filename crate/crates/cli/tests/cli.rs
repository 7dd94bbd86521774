use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn loadcast(dir: &Path, args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loadcast"));
    cmd.current_dir(dir).args(args).env_remove("LOADCAST_SEED");
    if let Some(seed) = env_seed {
        cmd.env("LOADCAST_SEED", seed);
    }
    cmd.output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = loadcast(dir, args, None);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn workspace(config: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), config).unwrap();
    dir
}

fn read(path: PathBuf) -> String {
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

const SMALL_SUITE: &str = "synth.seasonal = 2\nsynth.constant = 1\nsynth.length = 4320\n";

#[test]
fn synth_single_constant() {
    let dir = workspace("synth.constant = 1\nsynth.length = 100\n");
    ok(dir.path(), &["synth", "--config", "run.cfg"]);
    let files: Vec<_> = fs::read_dir(dir.path().join("out/traces")).unwrap().collect();
    assert_eq!(files.len(), 1);
    let text = read(dir.path().join("out/traces/constant-00.csv"));
    let values: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values.len(), 100);
    assert!(values.iter().all(|v| *v == values[0]));
}

#[test]
fn synth_default_suite_is_deterministic() {
    let dir = workspace("");
    ok(dir.path(), &["synth", "--config", "run.cfg", "--out", "a"]);
    ok(dir.path(), &["synth", "--config", "run.cfg", "--out", "b", "--jobs", "1"]);
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a/traces"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 50);
    for name in names {
        assert_eq!(
            fs::read(dir.path().join("a/traces").join(&name)).unwrap(),
            fs::read(dir.path().join("b/traces").join(&name)).unwrap()
        );
    }
}

#[test]
fn seed_sources_in_order() {
    let dir = workspace("synth.noisy = 1\nsynth.length = 50\n");
    let p = dir.path();
    let run = |out: &str, extra: &[&str], env: Option<&str>| {
        let mut args = vec!["synth", "--config", "run.cfg", "--out", out];
        args.extend_from_slice(extra);
        assert!(loadcast(p, &args, env).status.success());
        read(p.join(out).join("traces/noisy-00.csv"))
    };
    let default = run("d", &[], None);
    let env7 = run("e", &[], Some("7"));
    let flag7 = run("f", &["--seed", "7"], Some("3"));
    assert_ne!(default, env7);
    assert_eq!(env7, flag7);

    fs::write(p.join("run.cfg"), "seed = 7\nsynth.noisy = 1\nsynth.length = 50\n").unwrap();
    assert_eq!(run("g", &[], Some("3")), env7);
}

#[test]
fn analyze_constant_trace() {
    let dir = workspace("synth.constant = 1\nsynth.length = 2880\n");
    ok(dir.path(), &["analyze", "--config", "run.cfg"]);
    let summary = read(dir.path().join("out/analysis/summary.csv"));
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "constant-00");
    assert_eq!(row[3], "0.000000000");
    assert_eq!(row[4], "degenerate");
}

#[test]
fn analyze_seasonal_period() {
    let dir = workspace(SMALL_SUITE);
    ok(dir.path(), &["analyze", "--config", "run.cfg"]);
    let summary = read(dir.path().join("out/analysis/summary.csv"));
    assert_eq!(summary.lines().count(), 1 + 3 + 2);
    assert!(summary.lines().nth(1).unwrap().ends_with(",72"));
    let decomposition = read(dir.path().join("out/analysis/seasonal-00.decomposition.csv"));
    assert!(decomposition.starts_with("t,observed,trend,seasonal,residual\n"));
    assert_eq!(decomposition.lines().count(), 1 + 216);
}

#[test]
fn analyze_reads_csv_inputs() {
    let dir = workspace("inputs = data\nresample = 1\nspacing_minutes = 60\n");
    fs::create_dir(dir.path().join("data")).unwrap();
    let rows: String = (0..96)
        .map(|t| format!("{t},{}\n", 40.0 + 10.0 * (t as f64 * std::f64::consts::TAU / 24.0).sin()))
        .collect();
    fs::write(dir.path().join("data/vm.csv"), format!("t,value\n{rows}")).unwrap();
    fs::write(dir.path().join("data/broken.csv"), "t,value\n0,150\n").unwrap();
    let out = loadcast(dir.path(), &["analyze", "--config", "run.cfg"], None);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.csv"));
    let summary = read(dir.path().join("out/analysis/summary.csv"));
    assert!(summary.lines().nth(1).unwrap().starts_with("vm,96,"));
    assert!(summary.lines().nth(1).unwrap().ends_with(",24"));
}

#[test]
fn analyze_fails_when_every_input_fails() {
    let dir = workspace("inputs = bad.csv\n");
    fs::write(dir.path().join("bad.csv"), "t,value\n0,-5\n").unwrap();
    let out = loadcast(dir.path(), &["analyze", "--config", "run.cfg"], None);
    assert!(!out.status.success());
}

#[test]
fn bench_naive_only_is_reproducible() {
    let dir = workspace(&format!("{SMALL_SUITE}models = naive_last, naive_mean\n"));
    ok(dir.path(), &["bench", "--config", "run.cfg", "--out", "one", "--jobs", "1"]);
    ok(dir.path(), &["bench", "--config", "run.cfg", "--out", "two", "--jobs", "3"]);
    let report = read(dir.path().join("one/report.csv"));
    assert_eq!(report, read(dir.path().join("two/report.csv")));
    assert_eq!(
        read(dir.path().join("one/report.md")),
        read(dir.path().join("two/report.md"))
    );
    let models: std::collections::BTreeSet<&str> =
        report.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(models.into_iter().collect::<Vec<_>>(), ["naive_last", "naive_mean"]);
    assert_eq!(report.lines().count(), 1 + 3 * 2 * 2);
    let overlay = read(dir.path().join("one/overlays/seasonal-01.naive_mean.csv"));
    assert!(overlay.starts_with("t,actual,predicted\n173,"));
}

#[test]
fn bench_all_models() {
    let dir = workspace(&format!(
        "{SMALL_SUITE}sarima.order = 1,0,1,1,0,1\nlstm.max_epochs = 2\nlstm.hidden_size = 4\n"
    ));
    ok(dir.path(), &["bench", "--config", "run.cfg"]);
    let report = read(dir.path().join("out/report.csv"));
    assert_eq!(report.lines().count(), 1 + 3 * 4 * 2);
    assert!(report.lines().skip(1).all(|l| !l.contains(",,,,,")));
    let md = read(dir.path().join("out/report.md"));
    assert!(md.contains("## sarima (long)"));
    assert!(md.contains("| **Minimum** |"));
}

#[test]
fn tune_trivial_grid() {
    let dir = workspace(&format!(
        "{SMALL_SUITE}sarima.max_order = 0\nsweep.layers = 1\nsweep.dropout = 0\nsweep.hidden_size = 3\nlstm.max_epochs = 1\n"
    ));
    ok(dir.path(), &["tune", "--config", "run.cfg"]);
    let orders = read(dir.path().join("out/tune/sarima_orders.csv"));
    assert!(orders.lines().skip(1).all(|l| l.contains(",0,0,0,0,0,0,72,")), "{orders}");
    let sweep = read(dir.path().join("out/tune/lstm_sweep.csv"));
    assert_eq!(sweep.lines().count(), 2);
    assert!(sweep.lines().nth(1).unwrap().starts_with("1,3,0,"));
    assert!(read(dir.path().join("out/tune/lstm_sweep.md")).contains("| 1 | 3 | 0 |"));
}

#[test]
fn fit_then_forecast() {
    let dir = workspace(&format!(
        "{SMALL_SUITE}sarima.order = 1,0,0,1,0,0\nlstm.max_epochs = 2\nlstm.hidden_size = 4\nforecast.steps = 5\n"
    ));
    ok(dir.path(), &["fit", "--config", "run.cfg"]);
    let model = read(dir.path().join("out/models/seasonal-00.sarima.model"));
    assert!(model.contains("m=72\n"));
    assert!(read(dir.path().join("out/models/seasonal-00.lstm.model")).contains("layer.1.cell.wh.3.3="));
    ok(dir.path(), &["forecast", "--config", "run.cfg"]);
    let path = read(dir.path().join("out/forecasts/seasonal-00.sarima.csv"));
    assert_eq!(path.lines().count(), 1 + 5);
    assert!(path.lines().nth(1).unwrap().starts_with("216,"));
    assert_eq!(read(dir.path().join("out/forecasts/seasonal-00.lstm.csv")).lines().count(), 1 + 3);
}

#[test]
fn forecast_without_models_fails() {
    let dir = workspace(SMALL_SUITE);
    let out = loadcast(dir.path(), &["forecast", "--config", "run.cfg"], None);
    assert!(!out.status.success());
}

#[test]
fn bad_config_is_fatal() {
    let dir = workspace("lstm.hidden = 3\n");
    let out = loadcast(dir.path(), &["synth", "--config", "run.cfg"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
    let out = loadcast(dir.path(), &["synth", "--config", "missing.cfg"], None);
    assert!(!out.status.success());
}
