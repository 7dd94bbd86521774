//! Trace data model: ingestion, resampling, splitting and sliding windows.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textio;

/// Epoch-second timestamps start above this value; anything smaller in the
/// first CSV column is read as a plain index.
const EPOCH_THRESHOLD: i64 = 100_000_000;

/// A uniformly spaced univariate trace of CPU-usage percentages.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    spacing_minutes: f64,
    values: Vec<f64>,
    origin_timestamp: Option<i64>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, spacing_minutes: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyTrace);
        }
        if !(spacing_minutes.is_finite() && spacing_minutes > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "spacing must be positive, got {spacing_minutes}"
            )));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=100.0).contains(*v))
        {
            return Err(Error::OutOfRange { index, value });
        }
        Ok(Self {
            id: id.into(),
            spacing_minutes,
            values,
            origin_timestamp: None,
        })
    }

    pub fn with_origin(mut self, origin: Option<i64>) -> Self {
        self.origin_timestamp = origin;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spacing_minutes(&self) -> f64 {
        self.spacing_minutes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin_timestamp(&self) -> Option<i64> {
        self.origin_timestamp
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        anchored_mean(&self.values)
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Sub-range `[start, end)` as a new series sharing id and spacing.
    pub fn slice(&self, start: usize, end: usize) -> Result<TimeSeries> {
        if start >= end || end > self.len() {
            return Err(Error::EmptyTrace);
        }
        let origin = self
            .origin_timestamp
            .map(|o| o + (start as f64 * self.spacing_minutes * 60.0).round() as i64);
        Ok(TimeSeries {
            id: self.id.clone(),
            spacing_minutes: self.spacing_minutes,
            values: self.values[start..end].to_vec(),
            origin_timestamp: origin,
        })
    }

    /// Renders the trace as `t,value` CSV. `t` is epoch seconds when an
    /// origin is known, otherwise the point index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let t = match self.origin_timestamp {
                Some(o) => o + (k as f64 * self.spacing_minutes * 60.0).round() as i64,
                None => k as i64,
            };
            let _ = writeln!(out, "{t},{}", textio::fmt_num(*v));
        }
        out
    }
}

/// Mean accumulated as offsets from the first value, so a constant slice
/// gives back exactly that constant.
pub(crate) fn anchored_mean(values: &[f64]) -> f64 {
    let Some(&anchor) = values.first() else {
        return f64::NAN;
    };
    anchor + values.iter().map(|v| v - anchor).sum::<f64>() / values.len() as f64
}

/// Reads a `t,value` trace. Index-valued `t` is taken to be in minutes.
pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeries> {
    load_csv_with_index_spacing(path, 1.0)
}

/// Like [`load_csv`], but an integer index column advances by
/// `index_spacing_minutes` per unit.
pub fn load_csv_with_index_spacing(
    path: impl AsRef<Path>,
    index_spacing_minutes: f64,
) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".to_string());
    parse_csv(&text, &id, index_spacing_minutes).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        },
        other => other,
    })
}

/// Parses trace CSV text; see [`load_csv`].
pub fn parse_csv(text: &str, id: &str, index_spacing_minutes: f64) -> Result<TimeSeries> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: id.into(),
        line,
        message,
    };
    let mut stamps = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if lineno == 0 && line.trim() == "t,value" {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(lineno + 1, format!("expected 2 fields in '{line}'")));
        };
        let t: i64 = t
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno + 1, format!("bad timestamp '{t}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno + 1, format!("bad value '{v}'")))?;
        stamps.push((lineno + 1, t));
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if let Some((index, &value)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=100.0).contains(*v))
    {
        return Err(Error::OutOfRange { index, value });
    }

    let epoch = stamps[0].1 >= EPOCH_THRESHOLD;
    let unit_minutes = if epoch { 1.0 / 60.0 } else { index_spacing_minutes };
    let spacing = if stamps.len() >= 2 {
        let gap = stamps[1].1 - stamps[0].1;
        if gap <= 0 {
            return Err(Error::UngriddedData {
                row: stamps[1].0,
                expected: 1.0,
                found: gap as f64,
            });
        }
        for pair in stamps.windows(2) {
            let found = pair[1].1 - pair[0].1;
            if found != gap {
                return Err(Error::UngriddedData {
                    row: pair[1].0,
                    expected: gap as f64,
                    found: found as f64,
                });
            }
        }
        gap as f64 * unit_minutes
    } else {
        index_spacing_minutes
    };
    let origin = epoch.then_some(stamps[0].1);
    Ok(TimeSeries::new(id, spacing, values)?.with_origin(origin))
}

/// Averages consecutive non-overlapping blocks of `bin` points. A trailing
/// partial block is dropped.
pub fn resample_mean(series: &TimeSeries, bin: usize) -> Result<TimeSeries> {
    if bin == 0 {
        return Err(Error::InvalidConfig("resample bin must be at least 1".into()));
    }
    if bin > series.len() {
        return Err(Error::EmptyTrace);
    }
    let values = series
        .values
        .chunks_exact(bin)
        .map(|block| {
            // Accumulate offsets from the first element so constant blocks
            // average back to exactly that constant.
            let anchor = block[0];
            let offset: f64 = block.iter().map(|v| v - anchor).sum();
            (anchor + offset / bin as f64).clamp(0.0, 100.0)
        })
        .collect();
    Ok(TimeSeries {
        id: series.id.clone(),
        spacing_minutes: series.spacing_minutes * bin as f64,
        values,
        origin_timestamp: series.origin_timestamp,
    })
}

/// How a trace is divided into training and held-out segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Fraction of the trace held out for the long-term horizon.
    pub test_fraction: f64,
    /// Number of leading held-out points forming the short-term horizon.
    pub short_term_points: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            short_term_points: 3,
        }
    }
}

impl SplitSpec {
    /// Number of held-out points for a series of length `n`.
    pub fn long_len(&self, n: usize) -> usize {
        (self.test_fraction * n as f64 + 1e-9).floor() as usize
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "test fraction {} not in (0, 1)",
                self.test_fraction
            )));
        }
        let long = self.long_len(n);
        if long < 1 {
            return Err(Error::InvalidSplit(format!(
                "test fraction {} of {n} points leaves no test data",
                self.test_fraction
            )));
        }
        if long >= n {
            return Err(Error::InvalidSplit("no training data left".into()));
        }
        if self.short_term_points < 1 || self.short_term_points > n.saturating_sub(1) {
            return Err(Error::InvalidSplit(format!(
                "short-term horizon {} invalid for {n} points",
                self.short_term_points
            )));
        }
        if self.short_term_points > long {
            return Err(Error::InvalidSplit(format!(
                "short-term horizon {} exceeds the {long}-point test segment",
                self.short_term_points
            )));
        }
        Ok(())
    }
}

/// Result of [`split`].
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: TimeSeries,
    pub long_test: TimeSeries,
    pub short_test: TimeSeries,
}

/// Holds out the final `test_fraction` of the trace. The short-term test set
/// is the first `short_term_points` of the held-out segment.
pub fn split(series: &TimeSeries, spec: &SplitSpec) -> Result<Split> {
    let n = series.len();
    spec.validate(n)?;
    let boundary = n - spec.long_len(n);
    let train = series.slice(0, boundary)?;
    let long_test = series.slice(boundary, n)?;
    let short_test = long_test.slice(0, spec.short_term_points)?;
    Ok(Split {
        train,
        long_test,
        short_test,
    })
}

/// One supervised example: `input` is `input_width × channels` values in
/// time-major order, `target` has `horizon` values.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    pub start: usize,
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    pub input_width: usize,
    pub horizon: usize,
    pub channels: usize,
    pub pairs: Vec<WindowPair>,
    pub source_id: String,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Stride-1 windows: each `w`-point input is followed by its `h`-point target.
pub fn sliding_windows(series: &TimeSeries, w: usize, h: usize) -> Result<WindowSet> {
    if w == 0 || h == 0 {
        return Err(Error::InvalidConfig("window and horizon must be positive".into()));
    }
    let n = series.len();
    if n < w + h {
        return Err(Error::InsufficientData {
            required: w + h,
            actual: n,
        });
    }
    let v = series.values();
    let pairs = (0..=n - w - h)
        .map(|start| WindowPair {
            start,
            input: v[start..start + w].to_vec(),
            target: v[start + w..start + w + h].to_vec(),
        })
        .collect();
    Ok(WindowSet {
        input_width: w,
        horizon: h,
        channels: 1,
        pairs,
        source_id: series.id.clone(),
    })
}

/// Windows over several aligned channels. Every time step of an input carries
/// all channels; targets come from `target_channel` alone.
pub fn multichannel_windows(
    channels: &[TimeSeries],
    target_channel: usize,
    w: usize,
    h: usize,
) -> Result<WindowSet> {
    let first = channels.first().ok_or(Error::EmptyCollection)?;
    if target_channel >= channels.len() {
        return Err(Error::ShapeError(format!(
            "target channel {target_channel} out of {} channels",
            channels.len()
        )));
    }
    let n = first.len();
    for (channel, s) in channels.iter().enumerate() {
        if s.len() != n {
            return Err(Error::ChannelMismatch {
                channel,
                expected: n,
                found: s.len(),
            });
        }
    }
    if w == 0 || h == 0 {
        return Err(Error::InvalidConfig("window and horizon must be positive".into()));
    }
    if n < w + h {
        return Err(Error::InsufficientData {
            required: w + h,
            actual: n,
        });
    }
    let c = channels.len();
    let target = channels[target_channel].values();
    let pairs = (0..=n - w - h)
        .map(|start| {
            let mut input = Vec::with_capacity(w * c);
            for t in start..start + w {
                input.extend(channels.iter().map(|s| s.values()[t]));
            }
            WindowPair {
                start,
                input,
                target: target[start + w..start + w + h].to_vec(),
            }
        })
        .collect();
    Ok(WindowSet {
        input_width: w,
        horizon: h,
        channels: c,
        pairs,
        source_id: channels[target_channel].id.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new("t", 1.0, values).unwrap()
    }

    #[test]
    fn csv_three_rows() {
        let s = parse_csv("t,value\n0,10\n1,20\n2,30\n", "x", 1.0).unwrap();
        assert_eq!(s.values(), &[10.0, 20.0, 30.0]);
        assert_eq!(s.spacing_minutes(), 1.0);
        assert_eq!(s.origin_timestamp(), None);
    }

    #[test]
    fn csv_rejects_out_of_range() {
        let err = parse_csv("t,value\n0,10\n1,150\n", "x", 1.0).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { index: 1, .. }));
    }

    #[test]
    fn csv_rejects_gaps() {
        let err = parse_csv("t,value\n0,1\n1,2\n3,3\n", "x", 1.0).unwrap_err();
        assert!(matches!(err, Error::UngriddedData { .. }));
    }

    #[test]
    fn csv_empty() {
        assert!(matches!(parse_csv("t,value\n", "x", 1.0), Err(Error::EmptyTrace)));
    }

    #[test]
    fn csv_epoch_seconds() {
        let s = parse_csv(
            "t,value\n1600000000,1\n1600001200,2\n1600002400,3\n",
            "x",
            1.0,
        )
        .unwrap();
        assert_eq!(s.spacing_minutes(), 20.0);
        assert_eq!(s.origin_timestamp(), Some(1_600_000_000));
        let again = parse_csv(&s.to_csv(), "x", 1.0).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn resample_forty_by_twenty() {
        let s = ts((0..40).map(|v| v as f64).collect());
        let r = resample_mean(&s, 20).unwrap();
        assert_eq!(r.values(), &[9.5, 29.5]);
        assert_eq!(r.spacing_minutes(), 20.0);
    }

    #[test]
    fn resample_constant_is_exact() {
        let s = ts(vec![7.0; 45]);
        for bin in 1..=45 {
            let r = resample_mean(&s, bin).unwrap();
            assert!(r.values().iter().all(|&v| v == 7.0));
        }
        let s = ts(vec![12.3; 60]);
        assert!(resample_mean(&s, 20).unwrap().values().iter().all(|&v| v == 12.3));
    }

    #[test]
    fn resample_day_to_twenty_minute_bins() {
        let s = ts(vec![1.0; 21600]);
        assert_eq!(resample_mean(&s, 20).unwrap().len(), 1080);
    }

    #[test]
    fn resample_bin_too_large() {
        assert!(matches!(resample_mean(&ts(vec![1.0; 3]), 4), Err(Error::EmptyTrace)));
    }

    #[test]
    fn split_hundred() {
        let s = ts((0..100).map(|v| v as f64 / 2.0).collect());
        let sp = split(&s, &SplitSpec::default()).unwrap();
        assert_eq!(sp.train.len(), 80);
        assert_eq!(sp.long_test.len(), 20);
        assert_eq!(sp.short_test.values(), &sp.long_test.values()[..3]);
    }

    #[test]
    fn split_three_days() {
        let s = TimeSeries::new("x", 20.0, vec![5.0; 1080]).unwrap();
        let sp = split(&s, &SplitSpec::default()).unwrap();
        assert_eq!(sp.long_test.len(), 216);
        assert_eq!(sp.long_test.len() as f64 * 20.0 / 60.0, 72.0);
    }

    #[test]
    fn split_too_small() {
        let s = ts(vec![1.0; 10]);
        let spec = SplitSpec {
            test_fraction: 0.05,
            short_term_points: 1,
        };
        assert!(matches!(split(&s, &spec), Err(Error::InvalidSplit(_))));
    }

    #[test]
    fn windows_counts() {
        let s = ts((1..=9).map(|v| v as f64).collect());
        let w = sliding_windows(&s, 6, 3).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.pairs[0].input, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(w.pairs[0].target, vec![7.0, 8.0, 9.0]);

        let s = ts((1..=10).map(|v| v as f64).collect());
        let w = sliding_windows(&s, 6, 3).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.pairs[1].start, 1);
        assert_eq!(w.pairs[1].input[0], 2.0);

        let s = ts(vec![1.0; 8]);
        assert!(matches!(
            sliding_windows(&s, 6, 3),
            Err(Error::InsufficientData { required: 9, actual: 8 })
        ));
    }

    #[test]
    fn multichannel_layout_and_mismatch() {
        let a = ts(vec![1.0, 2.0, 3.0, 4.0]);
        let b = ts(vec![10.0, 20.0, 30.0, 40.0]);
        let w = multichannel_windows(&[a.clone(), b.clone()], 1, 2, 1).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.pairs[0].input, vec![1.0, 10.0, 2.0, 20.0]);
        assert_eq!(w.pairs[0].target, vec![30.0]);

        let short = ts(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            multichannel_windows(&[a, short], 0, 2, 1),
            Err(Error::ChannelMismatch { channel: 1, .. })
        ));
    }

    fn series_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..=100.0, 1..300)
    }

    proptest! {
        #[test]
        fn resample_identity_and_mean(values in series_strategy(), bin in 1usize..25) {
            let s = ts(values.clone());
            let same = resample_mean(&s, 1).unwrap();
            prop_assert_eq!(same.values(), s.values());
            if bin <= values.len() {
                let r = resample_mean(&s, bin).unwrap();
                prop_assert_eq!(r.len(), values.len() / bin);
                let kept = &values[..r.len() * bin];
                let direct = kept.iter().sum::<f64>() / kept.len() as f64;
                prop_assert!((r.mean() - direct).abs() <= 1e-9);
            }
        }

        #[test]
        fn split_concatenates(values in prop::collection::vec(0.0f64..=100.0, 20..300),
                              frac in 0.05f64..0.6) {
            let s = ts(values.clone());
            let spec = SplitSpec { test_fraction: frac, short_term_points: 1 };
            if let Ok(sp) = split(&s, &spec) {
                let joined: Vec<f64> = sp.train.values().iter()
                    .chain(sp.long_test.values()).copied().collect();
                prop_assert_eq!(joined, values);
            }
        }

        #[test]
        fn windows_are_contiguous(values in prop::collection::vec(0.0f64..=100.0, 2..100),
                                  w in 1usize..8, h in 1usize..5) {
            let s = ts(values.clone());
            match sliding_windows(&s, w, h) {
                Ok(set) => {
                    prop_assert_eq!(set.len(), values.len() + 1 - w - h);
                    for p in &set.pairs {
                        let joined: Vec<f64> = p.input.iter().chain(&p.target).copied().collect();
                        prop_assert_eq!(&joined[..], &values[p.start..p.start + w + h]);
                    }
                }
                Err(_) => prop_assert!(values.len() < w + h),
            }
        }
    }
}
