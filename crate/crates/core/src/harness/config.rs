//! Experiment configuration in flat `key = value` form.
//!
//! ```text
//! # traffic: either Pareto parameters or a trace to fit
//! on_shape = 5
//! on_mean_us = 341.33
//! off_shape = 5
//! off_mean_us = 20
//! rate = 1e6
//! code = optimize        # or: 63,45
//! frames_count = 2000
//! ```
//!
//! Each state takes `*_shape` plus one of `*_scale_us` or `*_mean_us`.
//! `trace` names a trace CSV (relative to the config file) and replaces all
//! four Pareto keys.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codesearch::DEFAULT_PE_THRESHOLD;
use crate::error::{Error, Result};
use crate::phy::frame::{MAX_PAYLOAD, MIN_PAYLOAD};
use crate::phy::modem::{DEFAULT_ERASURE_RUN_BITS, DEFAULT_SAMPLES_PER_BIT, MIN_SAMPLES_PER_BIT};
use crate::rscodec::RsCode;
use crate::traffic::{load_trace, ParetoParams, TrafficStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Pareto(TrafficStats),
    Trace(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeChoice {
    Optimize,
    Fixed(RsCode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbol,
    Sample,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Symbol => "symbol",
            Mode::Sample => "sample",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// On-off keyed bit rate in bits per second.
    pub rate: f64,
    pub code: CodeChoice,
    pub pe_threshold: f64,
    pub frames_count: usize,
    pub payload_bytes: usize,
    pub mode: Mode,
    pub noise_sigma: f64,
    pub seed: u64,
    pub samples_per_bit: usize,
    pub erasure_run_bits: usize,
}

impl ExperimentConfig {
    /// Defaults around the given traffic: 1 Mbit/s, optimized code, 2000
    /// frames of 108 bytes, symbol-level, noiseless.
    pub fn new(stats: TrafficStats) -> Self {
        Self {
            scenario: Scenario::Pareto(stats),
            rate: 1e6,
            code: CodeChoice::Optimize,
            pe_threshold: DEFAULT_PE_THRESHOLD,
            frames_count: 2000,
            payload_bytes: 108,
            mode: Mode::Symbol,
            noise_sigma: 0.0,
            seed: 0,
            samples_per_bit: DEFAULT_SAMPLES_PER_BIT,
            erasure_run_bits: DEFAULT_ERASURE_RUN_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return bad("rate", format!("must be positive, got {}", self.rate));
        }
        if !(self.pe_threshold > 0.0 && self.pe_threshold < 1.0) {
            return bad("pe_threshold", format!("must lie in (0, 1), got {}", self.pe_threshold));
        }
        if self.frames_count == 0 {
            return bad("frames_count", "must be at least 1".into());
        }
        if !(MIN_PAYLOAD..=MAX_PAYLOAD).contains(&self.payload_bytes) {
            return bad("payload_bytes", format!("must lie in {MIN_PAYLOAD}..={MAX_PAYLOAD}, got {}", self.payload_bytes));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise_sigma", format!("must be >= 0, got {}", self.noise_sigma));
        }
        if self.samples_per_bit < MIN_SAMPLES_PER_BIT {
            return bad("samples_per_bit", format!("must be >= {MIN_SAMPLES_PER_BIT}, got {}", self.samples_per_bit));
        }
        Ok(())
    }

    /// The traffic statistics, fitting the trace if the scenario names one.
    pub fn traffic_stats(&self) -> Result<TrafficStats> {
        match &self.scenario {
            Scenario::Pareto(s) => Ok(*s),
            Scenario::Trace(p) => TrafficStats::fit(&load_trace(p)?),
        }
    }

    /// Parse config text. Relative trace paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut raw: Vec<(usize, String, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if raw.iter().any(|(_, seen, _)| *seen == k) {
                return Err(Error::Config(format!("line {}: {k} given twice", i + 1)));
            }
            raw.push((i + 1, k, v));
        }
        let get = |key: &str| raw.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()));
        fn num<T: std::str::FromStr>(key: &str, entry: Option<(usize, &str)>) -> Result<Option<T>>
        where
            T::Err: fmt::Display,
        {
            entry
                .map(|(line, v)| {
                    v.parse::<T>().map_err(|e| Error::Config(format!("line {line}: {key} = {v:?}: {e}")))
                })
                .transpose()
        }

        const KNOWN: &[&str] = &[
            "on_shape", "on_scale_us", "on_mean_us", "off_shape", "off_scale_us", "off_mean_us", "trace", "rate",
            "code", "pe_threshold", "frames_count", "payload_bytes", "mode", "noise_sigma", "seed",
            "samples_per_bit", "erasure_run_bits",
        ];
        if let Some((line, k, _)) = raw.iter().find(|(_, k, _)| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Config(format!("line {line}: unknown key {k}")));
        }

        let pareto_state = |state: &str| -> Result<Option<ParetoParams>> {
            let shape_key = format!("{state}_shape");
            let scale_key = format!("{state}_scale_us");
            let mean_key = format!("{state}_mean_us");
            let shape: Option<f64> = num(&shape_key, get(&shape_key))?;
            let scale: Option<f64> = num(&scale_key, get(&scale_key))?;
            let mean: Option<f64> = num(&mean_key, get(&mean_key))?;
            let wrap = |key: &str, r: Result<ParetoParams>| r.map_err(|e| Error::Config(format!("{key}: {e}")));
            match (shape, scale, mean) {
                (None, None, None) => Ok(None),
                (Some(_), Some(_), Some(_)) => {
                    Err(Error::Config(format!("give only one of {scale_key} and {mean_key}")))
                }
                (Some(sh), Some(sc), None) => wrap(&scale_key, ParetoParams::new(sh, sc)).map(Some),
                (Some(sh), None, Some(m)) => wrap(&mean_key, ParetoParams::with_mean(sh, m)).map(Some),
                (None, _, _) => Err(Error::Config(format!("missing {shape_key}"))),
                (Some(_), None, None) => Err(Error::Config(format!("missing {scale_key} or {mean_key}"))),
            }
        };
        let on = pareto_state("on")?;
        let off = pareto_state("off")?;
        let trace = get("trace").map(|(_, v)| {
            let p = PathBuf::from(v);
            match base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        });
        let scenario = match (on, off, trace) {
            (Some(on), Some(off), None) => Scenario::Pareto(TrafficStats { on, off }),
            (None, None, Some(p)) => Scenario::Trace(p),
            (_, _, Some(_)) => return Err(Error::Config("trace conflicts with Pareto parameters".into())),
            (None, _, None) => return Err(Error::Config("missing on-state parameters (on_shape, ...) or trace".into())),
            (_, None, None) => return Err(Error::Config("missing off-state parameters (off_shape, ...) or trace".into())),
        };

        let mut cfg = Self::new(TrafficStats {
            on: ParetoParams { shape: 2.0, scale_min: 1.0 },
            off: ParetoParams { shape: 2.0, scale_min: 1.0 },
        });
        cfg.scenario = scenario;
        if let Some(v) = num("rate", get("rate"))? {
            cfg.rate = v;
        }
        if let Some((line, v)) = get("code") {
            cfg.code = parse_code(v).map_err(|e| Error::Config(format!("line {line}: code = {v:?}: {e}")))?;
        }
        if let Some(v) = num("pe_threshold", get("pe_threshold"))? {
            cfg.pe_threshold = v;
        }
        if let Some(v) = num("frames_count", get("frames_count"))? {
            cfg.frames_count = v;
        }
        if let Some(v) = num("payload_bytes", get("payload_bytes"))? {
            cfg.payload_bytes = v;
        }
        if let Some((line, v)) = get("mode") {
            cfg.mode = match v {
                "symbol" => Mode::Symbol,
                "sample" => Mode::Sample,
                _ => return Err(Error::Config(format!("line {line}: mode must be symbol or sample, got {v:?}"))),
            };
        }
        if let Some(v) = num("noise_sigma", get("noise_sigma"))? {
            cfg.noise_sigma = v;
        }
        if let Some(v) = num("seed", get("seed"))? {
            cfg.seed = v;
        }
        if let Some(v) = num("samples_per_bit", get("samples_per_bit"))? {
            cfg.samples_per_bit = v;
        }
        if let Some(v) = num("erasure_run_bits", get("erasure_run_bits"))? {
            cfg.erasure_run_bits = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }
}

/// `optimize` or `n,k`.
pub fn parse_code(s: &str) -> Result<CodeChoice> {
    if s == "optimize" {
        return Ok(CodeChoice::Optimize);
    }
    let (n, k) = s
        .split_once(',')
        .ok_or_else(|| Error::param("expected \"optimize\" or \"n,k\""))?;
    let n = n.trim().parse().map_err(|e| Error::param(format!("n: {e}")))?;
    let k = k.trim().parse().map_err(|e| Error::param(format!("k: {e}")))?;
    Ok(CodeChoice::Fixed(RsCode::new(n, k)?))
}

impl fmt::Display for ExperimentConfig {
    /// Writes the config back in the file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scenario {
            Scenario::Pareto(s) => {
                writeln!(f, "on_shape = {}", s.on.shape)?;
                writeln!(f, "on_scale_us = {}", s.on.scale_min)?;
                writeln!(f, "off_shape = {}", s.off.shape)?;
                writeln!(f, "off_scale_us = {}", s.off.scale_min)?;
            }
            Scenario::Trace(p) => writeln!(f, "trace = {}", p.display())?,
        }
        writeln!(f, "rate = {}", self.rate)?;
        match self.code {
            CodeChoice::Optimize => writeln!(f, "code = optimize")?,
            CodeChoice::Fixed(c) => writeln!(f, "code = {},{}", c.n(), c.k())?,
        }
        writeln!(f, "pe_threshold = {}", self.pe_threshold)?;
        writeln!(f, "frames_count = {}", self.frames_count)?;
        writeln!(f, "payload_bytes = {}", self.payload_bytes)?;
        writeln!(f, "mode = {}", self.mode)?;
        writeln!(f, "noise_sigma = {}", self.noise_sigma)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "samples_per_bit = {}", self.samples_per_bit)?;
        writeln!(f, "erasure_run_bits = {}", self.erasure_run_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "on_shape = 5\non_mean_us = 300\noff_shape=5\noff_scale_us = 16 # SIFS\n\ncode = 63,45\nseed = 9\n";

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::parse(BASIC, None).unwrap();
        let s = cfg.traffic_stats().unwrap();
        assert!((s.on.mean().unwrap() - 300.0).abs() < 1e-9);
        assert_eq!(s.off.scale_min, 16.0);
        assert_eq!(cfg.code, CodeChoice::Fixed(RsCode::new(63, 45).unwrap()));
        assert_eq!((cfg.seed, cfg.frames_count, cfg.payload_bytes, cfg.mode), (9, 2000, 108, Mode::Symbol));
        assert_eq!(cfg.rate, 1e6);
        assert_eq!(cfg.pe_threshold, 1e-3);
    }

    #[test]
    fn display_round_trips() {
        let cfg = ExperimentConfig::parse(BASIC, None).unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.to_string(), None).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (format!("{BASIC}frames_count = 0\n"), "frames_count"),
            (format!("{BASIC}payload_bytes = 2\n"), "payload_bytes"),
            (format!("{BASIC}rate = fast\n"), "rate"),
            (format!("{BASIC}colour = blue\n"), "colour"),
            (format!("{BASIC}seed = 1\n"), "seed"),
            (BASIC.replace("63,45", "63,44"), "code"),
            (BASIC.replace("off_scale_us = 16", "off_mean_us = -1"), "off_mean_us"),
            (BASIC.replace("on_shape = 5\n", ""), "on_shape"),
            (format!("{BASIC}trace = x.csv\n"), "trace"),
            (format!("{BASIC}mode = analog\n"), "mode"),
        ];
        for (text, field) in cases {
            match ExperimentConfig::parse(&text, None) {
                Err(Error::Config(msg)) => assert!(msg.contains(field), "{msg:?} lacks {field}"),
                other => panic!("{field}: expected config error, got {other:?}"),
            }
        }
    }

    #[test]
    fn trace_path_is_relative_to_config() {
        let cfg = ExperimentConfig::parse("trace = t.csv\n", Some(Path::new("/data"))).unwrap();
        assert_eq!(cfg.scenario, Scenario::Trace(PathBuf::from("/data/t.csv")));
    }
}
