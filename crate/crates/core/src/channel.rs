//! Burst-erasure channel driven by the excitation on/off process.
//!
//! Two views of the same channel live here. The duration-level view draws an
//! explicit [`Gate`] of alternating Pareto on/off runs and marks every symbol
//! whose airtime touches an off run as lost. The symbol-level view is the
//! two-state Markov chain with per-symbol transition probabilities; its
//! stationary off probability `alpha / (alpha + beta)` feeds the closed-form
//! post-decoding error rate used by the code search.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rscodec::RsCode;
use crate::traffic::TrafficStats;

/// Two-state Markov channel at symbol granularity.
///
/// `alpha` is the on-to-off probability per symbol, `beta` off-to-on, and
/// `rate` the symbol rate in symbols per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovChannel {
    pub alpha: f64,
    pub beta: f64,
    pub rate: f64,
}

impl MarkovChannel {
    pub fn new(alpha: f64, beta: f64, rate: f64) -> Result<Self> {
        for (name, p) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("{name}={p} is not a probability")));
            }
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param(format!("symbol rate must be positive, got {rate}")));
        }
        Ok(Self { alpha, beta, rate })
    }

    /// Estimate the chain from fitted traffic statistics.
    ///
    /// Each transition probability is the symbol duration divided by the mean
    /// sojourn time of the state being left, so the chain's mean run lengths
    /// match the traffic's mean durations. Quotients above one (a state that
    /// lasts less than a symbol on average) are clamped with a warning.
    pub fn from_stats(stats: &TrafficStats, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param(format!("symbol rate must be positive, got {rate}")));
        }
        let mean_on = stats
            .on
            .mean()
            .map_err(|_| Error::InfeasibleChannel(format!("on-state mean is infinite (shape {})", stats.on.shape)))?;
        let mean_off = stats
            .off
            .mean()
            .map_err(|_| Error::InfeasibleChannel(format!("off-state mean is infinite (shape {})", stats.off.shape)))?;
        let symbol_us = 1e6 / rate;
        let clamp = |name: &str, raw: f64| {
            if raw > 1.0 {
                log::warn!("{name} = {raw:.3} exceeds one transition per symbol; clamped to 1");
                1.0
            } else {
                raw
            }
        };
        let alpha = clamp("alpha", symbol_us / mean_on);
        let beta = clamp("beta", symbol_us / mean_off);
        Self::new(alpha, beta, rate)
    }

    /// Row-stochastic transition matrix, state 0 = on, state 1 = off.
    pub fn transition_matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.alpha, self.alpha], [self.beta, 1.0 - self.beta]]
    }

    /// Average symbol loss probability `alpha / (alpha + beta)`.
    pub fn symbol_error_rate(&self) -> Result<f64> {
        let s = self.alpha + self.beta;
        if s == 0.0 {
            return Err(Error::Domain("alpha = beta = 0: the chain never moves, loss rate is undefined".into()));
        }
        Ok(self.alpha / s)
    }
}

/// Probability that more than `t` of `n` independent symbols are lost when
/// each is lost with probability `p`.
///
/// Summed in log space so large `n` with tiny `p` neither overflows the
/// binomial coefficient nor underflows the powers.
pub fn binomial_tail(n: usize, t: usize, p: f64) -> f64 {
    if t >= n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_fact = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_n = ln_fact(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut ln_fi = ln_fact(t + 1);
    let mut ln_fni = ln_fact(n - t - 1);
    let mut sum = 0.0;
    for i in t + 1..=n {
        if i > t + 1 {
            ln_fi += (i as f64).ln();
            ln_fni -= ((n - i + 1) as f64).ln();
        }
        sum += (ln_n - ln_fi - ln_fni + i as f64 * lp + (n - i) as f64 * lq).exp();
    }
    sum.min(1.0)
}

/// Post-decoding symbol error rate of `code` when symbols are lost i.i.d.
/// with probability `p_s`: the chance that more than `t` of the `n` symbols
/// of a codeword are lost.
pub fn post_decode_error_rate(code: RsCode, p_s: f64) -> f64 {
    binomial_tail(code.n(), code.t(), p_s)
}

/// Alternating on/off durations in microseconds, starting in the on state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    durations: Vec<f64>,
}

impl Gate {
    pub fn new(durations: Vec<f64>) -> Result<Self> {
        if let Some(d) = durations.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::param(format!("gate duration {d} is not positive")));
        }
        Ok(Self { durations })
    }

    /// A gate that stays on for `total_us`.
    pub fn always_on(total_us: f64) -> Self {
        Self { durations: vec![total_us] }
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn total_us(&self) -> f64 {
        self.durations.iter().sum()
    }

    /// `(start, end)` of every off run, in microseconds from the gate start.
    pub fn off_intervals(&self) -> Vec<(f64, f64)> {
        let mut t = 0.0;
        let mut out = Vec::with_capacity(self.durations.len() / 2);
        for (i, &d) in self.durations.iter().enumerate() {
            if i % 2 == 1 {
                out.push((t, t + d));
            }
            t += d;
        }
        out
    }

    /// Power samples of the excitation: `on_power` while on, `off_power`
    /// while off. Run boundaries are rounded to the nearest sample.
    pub fn to_power(&self, sample_rate_hz: f64, on_power: f64, off_power: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut t = 0.0;
        for (i, &d) in self.durations.iter().enumerate() {
            let start = (t * sample_rate_hz / 1e6).round() as usize;
            t += d;
            let end = (t * sample_rate_hz / 1e6).round() as usize;
            let level = if i % 2 == 0 { on_power } else { off_power };
            out.extend(std::iter::repeat_n(level, end - start));
        }
        out
    }

    /// Flags for `count` equal slots of `slot_us` starting at `start_us`:
    /// a slot is lost when its airtime overlaps an off run by a positive
    /// amount. A partially lost slot is a lost slot.
    pub fn lost_slots(&self, start_us: f64, slot_us: f64, count: usize) -> Result<Vec<bool>> {
        if !(slot_us.is_finite() && slot_us > 0.0) {
            return Err(Error::param(format!("slot duration must be positive, got {slot_us}")));
        }
        let end_us = start_us + slot_us * count as f64;
        if self.total_us() < end_us {
            return Err(Error::param(format!(
                "gate covers {:.3} us but the transmission needs {end_us:.3} us",
                self.total_us()
            )));
        }
        let mut lost = vec![false; count];
        for (a, b) in self.off_intervals() {
            if b <= start_us || a >= end_us {
                continue;
            }
            let first = ((a - start_us) / slot_us).floor().max(0.0) as usize;
            let last = (((b - start_us) / slot_us).ceil() as usize).min(count);
            for flag in &mut lost[first.min(count)..last] {
                *flag = true;
            }
        }
        Ok(lost)
    }
}

/// Draw alternating on/off durations from the two Pareto laws until
/// `total_us` is covered. Starts on, since a frame goes out only while the
/// excitation is present.
pub fn gate_durations<R: Rng + ?Sized>(rng: &mut R, stats: &TrafficStats, total_us: f64) -> Gate {
    let mut durations = Vec::new();
    let mut covered = 0.0;
    let mut on = true;
    while covered < total_us {
        let d = if on { stats.on.sample(rng) } else { stats.off.sample(rng) };
        durations.push(d);
        covered += d;
        on = !on;
    }
    Gate { durations }
}

/// Per-symbol loss flags.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureMask {
    pub erased: Vec<bool>,
}

impl ErasureMask {
    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    pub fn count(&self) -> usize {
        self.erased.iter().filter(|&&e| e).count()
    }

    pub fn fraction(&self) -> f64 {
        if self.erased.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.erased.len() as f64
        }
    }

    /// Lengths of maximal runs of erased symbols.
    pub fn burst_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = 0;
        for &e in &self.erased {
            if e {
                cur += 1;
            } else if cur > 0 {
                out.push(cur);
                cur = 0;
            }
        }
        if cur > 0 {
            out.push(cur);
        }
        out
    }
}

/// Symbol `i` occupies `[i / rate, (i + 1) / rate)` seconds from the gate
/// start and is erased when that interval touches an off run.
pub fn erasure_mask_from_gate(gate: &Gate, rate: f64, n_symbols: usize) -> Result<ErasureMask> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::param(format!("symbol rate must be positive, got {rate}")));
    }
    Ok(ErasureMask { erased: gate.lost_slots(0.0, 1e6 / rate, n_symbols)? })
}

/// Simulate the Markov chain for `n_symbols`, starting from its stationary
/// distribution.
pub fn erasure_mask_markov<R: Rng + ?Sized>(rng: &mut R, ch: &MarkovChannel, n_symbols: usize) -> ErasureMask {
    let p_off = ch.symbol_error_rate().unwrap_or(0.0);
    let mut off = rng.random::<f64>() < p_off;
    let mut erased = Vec::with_capacity(n_symbols);
    for i in 0..n_symbols {
        if i > 0 {
            let flip = if off { ch.beta } else { ch.alpha };
            if rng.random::<f64>() < flip {
                off = !off;
            }
        }
        erased.push(off);
    }
    ErasureMask { erased }
}
