//! Seeded synthetic CPU traces standing in for production cluster data.
//!
//! Each kind mimics one behaviour seen in real cluster traces: a daily cycle,
//! machines switched on and off, idle machines with load bursts, erratic
//! noise, and flat lines. Every generator is a pure function of its
//! arguments; values are clipped into `[0, 100]`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyntheticKind {
    Seasonal,
    OnOff,
    Bursty,
    Noisy,
    Constant,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 5] = [
        SyntheticKind::Seasonal,
        SyntheticKind::OnOff,
        SyntheticKind::Bursty,
        SyntheticKind::Noisy,
        SyntheticKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Seasonal => "seasonal",
            SyntheticKind::OnOff => "onoff",
            SyntheticKind::Bursty => "bursty",
            SyntheticKind::Noisy => "noisy",
            SyntheticKind::Constant => "constant",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntheticKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidKind(s.to_string()))
    }
}

/// Generates one synthetic trace at one-minute spacing.
///
/// `period` is the cycle length in points for the seasonal and on/off kinds
/// and is ignored by the others.
pub fn generate_synthetic(
    kind: SyntheticKind,
    length: usize,
    period: usize,
    seed: u64,
) -> Result<TimeSeries> {
    generate_with_spacing(kind, length, period, seed, 1.0)
}

pub fn generate_with_spacing(
    kind: SyntheticKind,
    length: usize,
    period: usize,
    seed: u64,
    spacing_minutes: f64,
) -> Result<TimeSeries> {
    if length == 0 {
        return Err(Error::EmptyTrace);
    }
    let needs_period = matches!(kind, SyntheticKind::Seasonal | SyntheticKind::OnOff);
    if needs_period && period == 0 {
        return Err(Error::InvalidConfig("period must be positive".into()));
    }
    if kind == SyntheticKind::Seasonal && length < 2 * period {
        return Err(Error::InsufficientData {
            required: 2 * period,
            actual: length,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = match kind {
        SyntheticKind::Seasonal => {
            let level = rng.random_range(25.0..55.0);
            let amplitude = rng.random_range(10.0..25.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let noise = Normal::new(0.0, rng.random_range(3.0..8.0)).unwrap();
            (0..length)
                .map(|t| {
                    let angle = std::f64::consts::TAU * t as f64 / period as f64 + phase;
                    level + amplitude * angle.sin() + noise.sample(&mut rng)
                })
                .collect()
        }
        SyntheticKind::OnOff => {
            let high = rng.random_range(50.0..90.0);
            let low = rng.random_range(0.0..10.0);
            let duty = rng.random_range(0.3..0.7);
            let offset = rng.random_range(0..period);
            let noise = Normal::new(0.0, 2.0).unwrap();
            (0..length)
                .map(|t| {
                    let phase = ((t + offset) % period) as f64 / period as f64;
                    let base = if phase < duty { high } else { low };
                    base + noise.sample(&mut rng)
                })
                .collect()
        }
        SyntheticKind::Bursty => {
            let baseline = rng.random_range(2.0..10.0);
            let noise = Normal::new(0.0, 1.0).unwrap();
            let mut remaining = 0usize;
            let mut height = 0.0;
            (0..length)
                .map(|_| {
                    if remaining == 0 && rng.random_bool(0.002) {
                        remaining = rng.random_range(20..120);
                        height = rng.random_range(30.0..80.0);
                    }
                    let burst = if remaining > 0 {
                        remaining -= 1;
                        height
                    } else {
                        0.0
                    };
                    baseline + burst + noise.sample(&mut rng)
                })
                .collect()
        }
        SyntheticKind::Noisy => {
            let mean = rng.random_range(20.0..60.0);
            let noise = Normal::new(0.0, rng.random_range(10.0..20.0)).unwrap();
            (0..length).map(|_| mean + noise.sample(&mut rng)).collect()
        }
        SyntheticKind::Constant => {
            // Two decimals, like a pinned utilisation reading.
            let value = (rng.random_range(5.0..50.0) * 100.0_f64).round() / 100.0;
            vec![value; length]
        }
    };
    let values = values.into_iter().map(|v| v.clamp(0.0, 100.0)).collect();
    TimeSeries::new(format!("{kind}"), spacing_minutes, values)
}

/// Class mix of a synthetic suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub counts: Vec<(SyntheticKind, usize)>,
    /// Points per trace, at one-minute spacing.
    pub length: usize,
    /// Daily period in points.
    pub period: usize,
    pub seed: u64,
}

impl SuiteSpec {
    /// Fifty fifteen-day traces: 20 seasonal, 10 on/off, 10 noisy,
    /// 5 bursty and 5 constant.
    pub fn standard(seed: u64) -> Self {
        Self {
            counts: vec![
                (SyntheticKind::Seasonal, 20),
                (SyntheticKind::OnOff, 10),
                (SyntheticKind::Noisy, 10),
                (SyntheticKind::Bursty, 5),
                (SyntheticKind::Constant, 5),
            ],
            length: 21_600,
            period: 1440,
            seed,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|(_, n)| n).sum()
    }
}

/// Per-trace seed derived from the suite seed and the trace's position.
pub fn member_seed(suite_seed: u64, index: usize) -> u64 {
    suite_seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Generates every member of a suite. Ids are `<kind>-<nn>`.
pub fn generate_suite(spec: &SuiteSpec) -> Result<Vec<(SyntheticKind, TimeSeries)>> {
    let mut out = Vec::with_capacity(spec.total());
    let mut index = 0;
    for &(kind, count) in &spec.counts {
        for k in 0..count {
            let series =
                generate_synthetic(kind, spec.length, spec.period, member_seed(spec.seed, index))?;
            let values = series.values().to_vec();
            out.push((
                kind,
                TimeSeries::new(format!("{kind}-{k:02}"), 1.0, values)?,
            ));
            index += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn autocorrelation(x: &[f64], lag: usize) -> f64 {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let denom: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let num: f64 = (lag..n).map(|t| (x[t] - mean) * (x[t - lag] - mean)).sum();
        num / denom
    }

    #[test]
    fn constant_kind() {
        let s = generate_synthetic(SyntheticKind::Constant, 10, 0, 3).unwrap();
        assert_eq!(s.len(), 10);
        assert!(s.values().iter().all(|&v| v == s.values()[0]));
    }

    #[test]
    fn deterministic_for_seed() {
        for kind in SyntheticKind::ALL {
            let a = generate_synthetic(kind, 288, 72, 42).unwrap();
            let b = generate_synthetic(kind, 288, 72, 42).unwrap();
            assert_eq!(a, b);
            assert!(a.values().iter().all(|v| (0.0..=100.0).contains(v)));
        }
        let c = generate_synthetic(SyntheticKind::Seasonal, 288, 72, 43).unwrap();
        assert_ne!(c, generate_synthetic(SyntheticKind::Seasonal, 288, 72, 42).unwrap());
    }

    #[test]
    fn seasonal_peak_at_period() {
        let s = generate_synthetic(SyntheticKind::Seasonal, 2160, 72, 42).unwrap();
        let r72 = autocorrelation(s.values(), 72);
        let r36 = autocorrelation(s.values(), 36);
        assert!(r72 > r36, "lag72 {r72} vs lag36 {r36}");
        assert!(r72 > 0.5);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!("sawtooth".parse::<SyntheticKind>(), Err(Error::InvalidKind(_))));
        assert_eq!("OnOff".parse::<SyntheticKind>().unwrap(), SyntheticKind::OnOff);
    }

    #[test]
    fn seasonal_needs_two_periods() {
        assert!(generate_synthetic(SyntheticKind::Seasonal, 100, 72, 0).is_err());
    }

    #[test]
    fn standard_suite_layout() {
        let spec = SuiteSpec {
            length: 2880,
            ..SuiteSpec::standard(7)
        };
        let suite = generate_suite(&spec).unwrap();
        assert_eq!(suite.len(), 50);
        assert_eq!(suite[0].1.id(), "seasonal-00");
        assert_eq!(suite[49].1.id(), "constant-04");
        let ids: std::collections::BTreeSet<_> = suite.iter().map(|(_, s)| s.id()).collect();
        assert_eq!(ids.len(), 50);
    }
}
