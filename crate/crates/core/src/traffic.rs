//! Pareto model of excitation on/off durations.
//!
//! Durations are in microseconds throughout. A [`DurationTrace`] keeps the
//! measured runs in temporal order; fitting reduces each state to a
//! [`ParetoParams`] by maximum likelihood.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pareto law with density `shape * scale^shape / x^(shape+1)` on `x >= scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoParams {
    pub shape: f64,
    pub scale_min: f64,
}

impl ParetoParams {
    pub fn new(shape: f64, scale_min: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::param(format!("Pareto shape must be positive, got {shape}")));
        }
        if !(scale_min.is_finite() && scale_min > 0.0) {
            return Err(Error::param(format!("Pareto scale must be positive, got {scale_min}")));
        }
        Ok(Self { shape, scale_min })
    }

    /// The parameters with the given shape whose mean is `mean`.
    pub fn with_mean(shape: f64, mean: f64) -> Result<Self> {
        if shape <= 1.0 {
            return Err(Error::InfiniteMean { state: "requested", shape });
        }
        Self::new(shape, mean * (shape - 1.0) / shape)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.scale_min {
            0.0
        } else {
            self.shape * self.scale_min.powf(self.shape) / x.powf(self.shape + 1.0)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.scale_min {
            0.0
        } else {
            1.0 - (self.scale_min / x).powf(self.shape)
        }
    }

    /// Inverse-CDF draw: `scale * U^(-1/shape)` with `U` uniform on (0, 1].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // random::<f64>() is on [0, 1); flip it onto (0, 1].
        let u = 1.0 - rng.random::<f64>();
        self.scale_min * u.powf(-1.0 / self.shape)
    }

    /// Mean duration; infinite when `shape <= 1`.
    pub fn mean(&self) -> Result<f64> {
        if self.shape <= 1.0 {
            return Err(Error::InfiniteMean { state: "Pareto", shape: self.shape });
        }
        Ok(self.shape * self.scale_min / (self.shape - 1.0))
    }

    /// Log-likelihood of `samples` under these parameters:
    /// `N log(shape) + N shape log(scale) - (shape + 1) sum log x_i`.
    ///
    /// Returns `-inf` when any sample lies below the scale.
    pub fn log_likelihood(&self, samples: &[f64]) -> f64 {
        if samples.iter().any(|&x| x < self.scale_min) {
            return f64::NEG_INFINITY;
        }
        let n = samples.len() as f64;
        let sum_log: f64 = samples.iter().map(|x| x.ln()).sum();
        n * self.shape.ln() + n * self.shape * self.scale_min.ln() - (self.shape + 1.0) * sum_log
    }
}

/// Maximum-likelihood Pareto fit.
///
/// The scale is the sample minimum (the likelihood grows with the scale up to
/// that bound) and the shape is `N / (sum log x_i - N log min)`.
pub fn mle_fit(samples: &[f64]) -> Result<ParetoParams> {
    if samples.len() < 2 {
        return Err(Error::param(format!("need at least 2 samples to fit, got {}", samples.len())));
    }
    if let Some(&bad) = samples.iter().find(|&&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::param(format!("sample {bad} is not a positive duration")));
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let n = samples.len() as f64;
    let denom: f64 = samples.iter().map(|x| x.ln()).sum::<f64>() - n * min.ln();
    if denom <= 0.0 {
        return Err(Error::DegenerateTrace { count: samples.len() });
    }
    ParetoParams::new(n / denom, min)
}

/// Fitted laws for both excitation states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficStats {
    pub off: ParetoParams,
    pub on: ParetoParams,
}

impl TrafficStats {
    pub fn fit(trace: &DurationTrace) -> Result<Self> {
        Ok(Self {
            off: mle_fit(&trace.off_durations())?,
            on: mle_fit(&trace.on_durations())?,
        })
    }

    /// Stationary fraction of time spent in the off state, `mean_off / (mean_off + mean_on)`.
    pub fn off_fraction(&self) -> Result<f64> {
        let off = self.off.mean()?;
        let on = self.on.mean()?;
        Ok(off / (off + on))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcitationState {
    On,
    Off,
}

impl ExcitationState {
    pub fn as_str(self) -> &'static str {
        match self {
            ExcitationState::On => "on",
            ExcitationState::Off => "off",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub state: ExcitationState,
    pub duration_us: f64,
}

/// Measured on/off runs in temporal order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DurationTrace {
    runs: Vec<Run>,
}

impl DurationTrace {
    pub fn new(runs: Vec<Run>) -> Result<Self> {
        if let Some(r) = runs.iter().find(|r| !(r.duration_us.is_finite() && r.duration_us > 0.0)) {
            return Err(Error::param(format!("duration {} is not positive", r.duration_us)));
        }
        Ok(Self { runs })
    }

    /// Build from alternating durations, the first one in state `first`.
    pub fn from_alternating(first: ExcitationState, durations: &[f64]) -> Result<Self> {
        let mut state = first;
        let runs = durations
            .iter()
            .map(|&d| {
                let r = Run { state, duration_us: d };
                state = match state {
                    ExcitationState::On => ExcitationState::Off,
                    ExcitationState::Off => ExcitationState::On,
                };
                r
            })
            .collect();
        Self::new(runs)
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    fn durations_of(&self, state: ExcitationState) -> Vec<f64> {
        self.runs.iter().filter(|r| r.state == state).map(|r| r.duration_us).collect()
    }

    pub fn off_durations(&self) -> Vec<f64> {
        self.durations_of(ExcitationState::Off)
    }

    pub fn on_durations(&self) -> Vec<f64> {
        self.durations_of(ExcitationState::On)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# state,duration_us\n");
        for r in &self.runs {
            // Display for f64 is the shortest representation that parses back exactly.
            let _ = writeln!(out, "{},{}", r.state.as_str(), r.duration_us);
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut runs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (state, dur) = line
                .split_once(',')
                .ok_or_else(|| err(format!("expected `state,duration_us`, got {line:?}")))?;
            let state = match state.trim() {
                "on" => ExcitationState::On,
                "off" => ExcitationState::Off,
                other => return Err(err(format!("unknown state {other:?}"))),
            };
            let duration_us: f64 = dur
                .trim()
                .parse()
                .map_err(|e| err(format!("bad duration {:?}: {e}", dur.trim())))?;
            if !(duration_us.is_finite() && duration_us > 0.0) {
                return Err(err(format!("duration {duration_us} is not positive")));
            }
            runs.push(Run { state, duration_us });
        }
        Ok(Self { runs })
    }
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<DurationTrace> {
    DurationTrace::parse_csv(&std::fs::read_to_string(path)?)
}

pub fn save_trace(trace: &DurationTrace, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, trace.to_csv())?;
    Ok(())
}

/// Run-length encode a thresholded power sequence into on/off durations.
///
/// A sample is "on" when its power is at least `power_threshold`. Each run
/// lasts `len / sample_rate` seconds; the first and last runs are partial
/// observations and are dropped.
pub fn measure_trace(power: &[f64], sample_rate_hz: f64, power_threshold: f64) -> Result<DurationTrace> {
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::param(format!("sample rate must be positive, got {sample_rate_hz}")));
    }
    let mut lengths: Vec<(ExcitationState, usize)> = Vec::new();
    for &p in power {
        let state = if p >= power_threshold { ExcitationState::On } else { ExcitationState::Off };
        match lengths.last_mut() {
            Some((s, len)) if *s == state => *len += 1,
            _ => lengths.push((state, 1)),
        }
    }
    if lengths.len() < 3 {
        return Err(Error::EmptyTrace);
    }
    let runs = lengths[1..lengths.len() - 1]
        .iter()
        .map(|&(state, len)| Run { state, duration_us: len as f64 * 1e6 / sample_rate_hz })
        .collect();
    Ok(DurationTrace { runs })
}
