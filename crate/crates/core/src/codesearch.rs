//! Rate-maximal RS code selection under a post-decoding error budget.
//!
//! [`optimize_code`] walks the five block lengths `n = 2^m - 1` and, for each,
//! scans `k` downward in steps of two until the predicted error rate fits the
//! threshold; the best rate among the per-length winners wins. The channel
//! only enters through its stationary loss probability, so the core of the
//! search is [`optimize_for_ps`]. [`brute_force_search`] scores every
//! admissible code and is kept as a cross-check.

use serde::{Deserialize, Serialize};

use crate::channel::{post_decode_error_rate, MarkovChannel};
use crate::error::{Error, Result};
use crate::gf2m::{MAX_M, MIN_M};
use crate::rscodec::RsCode;
use crate::traffic::TrafficStats;

pub const DEFAULT_PE_THRESHOLD: f64 = 1e-3;

/// A code and its predicted error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub n: usize,
    pub k: usize,
    pub pe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub code: RsCode,
    pub p_s: f64,
    pub predicted_pe: f64,
    pub rate: f64,
    /// Best feasible code for every block length that has one.
    pub feasible_alternatives: Vec<Candidate>,
}

/// Search for the traffic described by `stats` at `rate` symbols per second.
pub fn optimize_code(stats: &TrafficStats, rate: f64, pe_threshold: f64) -> Result<SearchOutcome> {
    let ch = MarkovChannel::from_stats(stats, rate)?;
    optimize_for_channel(&ch, pe_threshold)
}

pub fn optimize_for_channel(ch: &MarkovChannel, pe_threshold: f64) -> Result<SearchOutcome> {
    let p_s = ch
        .symbol_error_rate()
        .map_err(|e| Error::InfeasibleChannel(e.to_string()))?;
    optimize_for_ps(p_s, pe_threshold)
}

fn check_inputs(p_s: f64, pe_threshold: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::param(format!("symbol loss probability {p_s} outside [0, 1]")));
    }
    if !(pe_threshold > 0.0 && pe_threshold < 1.0) {
        return Err(Error::param(format!("p_e threshold {pe_threshold} outside (0, 1)")));
    }
    Ok(())
}

// a/b > c/d without floating point
fn higher_rate(a: RsCode, b: RsCode) -> bool {
    let (l, r) = (a.k() * b.n(), b.k() * a.n());
    l > r || (l == r && a.n() > b.n())
}

fn infeasible(threshold: f64, evaluated: impl Iterator<Item = Candidate>) -> Error {
    let best = evaluated
        .min_by(|a, b| a.pe.total_cmp(&b.pe))
        .expect("candidate set is never empty");
    Error::InfeasibleCode { threshold, best_pe: best.pe, best_n: best.n, best_k: best.k }
}

/// The heuristic search for a given per-symbol loss probability.
pub fn optimize_for_ps(p_s: f64, pe_threshold: f64) -> Result<SearchOutcome> {
    check_inputs(p_s, pe_threshold)?;
    let mut winners: Vec<Candidate> = Vec::new();
    // lowest p_e seen per length, reported when nothing is feasible
    let mut closest: Vec<Candidate> = Vec::new();
    for m in MIN_M..=MAX_M {
        let n = (1usize << m) - 1;
        let mut k = n - 2;
        loop {
            let code = RsCode::new(n, k)?;
            let pe = post_decode_error_rate(code, p_s);
            if pe <= pe_threshold {
                winners.push(Candidate { n, k, pe });
                break;
            }
            if k < 3 {
                closest.push(Candidate { n, k, pe });
                break;
            }
            k -= 2;
        }
    }
    let best = winners
        .iter()
        .map(|c| RsCode::new(c.n, c.k).expect("winner is admissible"))
        .reduce(|a, b| if higher_rate(b, a) { b } else { a });
    let Some(code) = best else {
        return Err(infeasible(pe_threshold, closest.into_iter()));
    };
    let predicted_pe = winners.iter().find(|c| c.n == code.n()).map(|c| c.pe).unwrap_or(0.0);
    Ok(SearchOutcome { code, p_s, predicted_pe, rate: code.rate(), feasible_alternatives: winners })
}

/// Score every admissible code and keep the highest-rate feasible one,
/// breaking rate ties toward the longer code.
pub fn brute_force_search(p_s: f64, pe_threshold: f64) -> Result<SearchOutcome> {
    check_inputs(p_s, pe_threshold)?;
    let all: Vec<(RsCode, f64)> = RsCode::admissible().map(|c| (c, post_decode_error_rate(c, p_s))).collect();
    let mut best: Option<(RsCode, f64)> = None;
    for &(code, pe) in &all {
        if pe <= pe_threshold && best.is_none_or(|(b, _)| higher_rate(code, b)) {
            best = Some((code, pe));
        }
    }
    let Some((code, predicted_pe)) = best else {
        return Err(infeasible(pe_threshold, all.iter().map(|&(c, pe)| Candidate { n: c.n(), k: c.k(), pe })));
    };
    let mut feasible_alternatives = Vec::new();
    for m in MIN_M..=MAX_M {
        let n = (1usize << m) - 1;
        if let Some(&(c, pe)) = all.iter().filter(|(c, pe)| c.n() == n && *pe <= pe_threshold).max_by_key(|(c, _)| c.k()) {
            feasible_alternatives.push(Candidate { n, k: c.k(), pe });
        }
    }
    Ok(SearchOutcome { code, p_s, predicted_pe, rate: code.rate(), feasible_alternatives })
}
