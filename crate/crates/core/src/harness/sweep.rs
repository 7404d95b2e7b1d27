//! Parameter sweeps, one experiment per point, written as CSV.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rscodec::RsCode;
use crate::traffic::{ParetoParams, TrafficStats};

use super::config::{CodeChoice, ExperimentConfig, Scenario};
use super::run::{run, LinkReport};

pub const SWEEP_HEADER: &str = "parameter,ber_baseline,ber_coded,fer_baseline,fer_coded,throughput";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub ber_baseline: f64,
    pub ber_coded: f64,
    pub fer_baseline: f64,
    pub fer_coded: f64,
    /// Coded-link throughput in payload bits per second.
    pub throughput: f64,
}

impl SweepRow {
    fn from_report(parameter: f64, r: &LinkReport) -> Self {
        Self {
            parameter,
            ber_baseline: r.baseline.ber,
            ber_coded: r.coded.ber,
            fer_baseline: r.baseline.fer,
            fer_coded: r.coded.fer,
            throughput: r.coded.throughput,
        }
    }
}

/// Vary the number of parity symbols `n - k` over every admissible value.
///
/// `n` comes from an explicit code in the config, or is 127 when the config
/// asks for optimization.
pub fn sweep_parity(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let n = match cfg.code {
        CodeChoice::Fixed(c) => c.n(),
        CodeChoice::Optimize => 127,
    };
    let mut rows = Vec::new();
    for k in (1..=n - 2).rev().step_by(2) {
        let code = RsCode::new(n, k)?;
        let point = ExperimentConfig { code: CodeChoice::Fixed(code), ..cfg.clone() };
        rows.push(SweepRow::from_report((n - k) as f64, &run(&point)?));
    }
    Ok(rows)
}

/// Vary the mean off-run duration (microseconds) at fixed off-state shape.
pub fn sweep_silent_duration(cfg: &ExperimentConfig, means_us: &[f64]) -> Result<Vec<SweepRow>> {
    let Scenario::Pareto(stats) = &cfg.scenario else {
        return Err(Error::Config("silent-duration sweep needs Pareto parameters, not a trace".into()));
    };
    let mut rows = Vec::new();
    for &mean in means_us {
        let off = ParetoParams::with_mean(stats.off.shape, mean)?;
        let point = ExperimentConfig { scenario: Scenario::Pareto(TrafficStats { off, ..*stats }), ..cfg.clone() };
        rows.push(SweepRow::from_report(mean, &run(&point)?));
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.parameter, r.ber_baseline, r.ber_coded, r.fer_baseline, r.fer_coded, r.throughput
        ));
    }
    out
}
