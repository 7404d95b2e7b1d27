//! Monte Carlo link experiments.
//!
//! Every frame draws its own excitation gate from a ChaCha stream keyed by
//! `(seed, frame index)`, so results do not depend on thread scheduling and a
//! frame sees the same gate in symbol and sample mode. Both the uncoded
//! baseline and the coded frame start transmitting at the gate's origin,
//! right at the beginning of an on run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{gate_durations, post_decode_error_rate, Gate, MarkovChannel};
use crate::codesearch::optimize_code;
use crate::error::Result;
use crate::phy::codec::{parse_uncoded, FrameCodec};
use crate::phy::frame::{bytes_to_bits, frame_build, frame_len};
use crate::phy::whiten::whiten;
use crate::phy::modem::{apply_channel, demodulate, modulate, DemodConfig, DEFAULT_DETECT_THRESHOLD, PREAMBLE_BITS};
use crate::rscodec::RsCode;
use crate::traffic::TrafficStats;

use super::config::{CodeChoice, ExperimentConfig, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub ber: f64,
    pub fer: f64,
    /// Delivered payload bits per second.
    pub throughput: f64,
    pub frame_errors: usize,
    pub bit_errors: usize,
}

/// Outcome of one frame for both systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: usize,
    pub baseline_error: bool,
    pub coded_error: bool,
    pub baseline_bit_errors: usize,
    pub coded_bit_errors: usize,
    /// Coded-transmission bits lost to the gate (symbol mode) or flagged by
    /// the demodulator (sample mode).
    pub erased_bits: usize,
    pub failed_codewords: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub mode: Mode,
    pub code: RsCode,
    pub p_s: f64,
    pub predicted_pe: f64,
    pub frames: usize,
    pub payload_bytes: usize,
    pub rate: f64,
    pub seed: u64,
    pub baseline: LinkMetrics,
    pub coded: LinkMetrics,
    #[serde(skip)]
    pub frame_log: Vec<FrameRecord>,
}

impl LinkReport {
    /// Per-frame log as CSV.
    pub fn frame_log_csv(&self) -> String {
        let mut out = String::from(
            "frame,baseline_error,coded_error,baseline_bit_errors,coded_bit_errors,erased_bits,failed_codewords\n",
        );
        for r in &self.frame_log {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.frame,
                u8::from(r.baseline_error),
                u8::from(r.coded_error),
                r.baseline_bit_errors,
                r.coded_bit_errors,
                r.erased_bits,
                r.failed_codewords
            ));
        }
        out
    }
}

/// Code, loss probability and predicted post-decoding error for a config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodePlan {
    pub code: RsCode,
    pub p_s: f64,
    pub predicted_pe: f64,
}

pub fn plan_code(cfg: &ExperimentConfig, stats: &TrafficStats) -> Result<CodePlan> {
    match cfg.code {
        CodeChoice::Optimize => {
            let out = optimize_code(stats, cfg.rate, cfg.pe_threshold)?;
            Ok(CodePlan { code: out.code, p_s: out.p_s, predicted_pe: out.predicted_pe })
        }
        CodeChoice::Fixed(code) => {
            let p_s = MarkovChannel::from_stats(stats, cfg.rate)?.symbol_error_rate()?;
            Ok(CodePlan { code, p_s, predicted_pe: post_decode_error_rate(code, p_s) })
        }
    }
}

/// Run the experiment in the mode the config asks for.
pub fn run(cfg: &ExperimentConfig) -> Result<LinkReport> {
    match cfg.mode {
        Mode::Symbol => run_symbol_level(cfg),
        Mode::Sample => run_sample_level(cfg),
    }
}

pub fn run_symbol_level(cfg: &ExperimentConfig) -> Result<LinkReport> {
    let ctx = Context::new(cfg)?;
    let log = (0..cfg.frames_count).into_par_iter().map(|i| ctx.symbol_frame(i)).collect();
    Ok(ctx.report(Mode::Symbol, log))
}

pub fn run_sample_level(cfg: &ExperimentConfig) -> Result<LinkReport> {
    let ctx = Context::new(cfg)?;
    let log = (0..cfg.frames_count)
        .into_par_iter()
        .map(|i| ctx.sample_frame(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ctx.report(Mode::Sample, log))
}

pub fn frame_rng(seed: u64, frame: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame as u64);
    rng
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    stats: TrafficStats,
    plan: CodePlan,
    codec: FrameCodec,
    frame_bits: usize,
    coded_bits: usize,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let stats = cfg.traffic_stats()?;
        let plan = plan_code(cfg, &stats)?;
        let codec = FrameCodec::new(plan.code)?;
        Ok(Self {
            cfg,
            stats,
            plan,
            frame_bits: frame_len(cfg.payload_bytes) * 8,
            coded_bits: codec.coded_bits(cfg.payload_bytes),
            codec,
        })
    }

    fn bit_us(&self) -> f64 {
        1e6 / self.cfg.rate
    }

    fn payload_bits(&self) -> usize {
        self.cfg.payload_bytes * 8
    }

    /// Frame-bit index range that holds the payload.
    fn payload_range(&self) -> std::ops::Range<usize> {
        8..8 + self.payload_bits()
    }

    fn draw_gate(&self, rng: &mut ChaCha8Rng) -> Gate {
        let bits = PREAMBLE_BITS + self.frame_bits.max(self.coded_bits);
        gate_durations(rng, &self.stats, bits as f64 * self.bit_us())
    }

    /// Half-open ranges of transmitted bits that overlap an off run, sorted.
    fn lost_bit_ranges(&self, gate: &Gate, total_bits: usize) -> Vec<(usize, usize)> {
        let bit_us = self.bit_us();
        let mut out = Vec::new();
        for (a, b) in gate.off_intervals() {
            let first = (a / bit_us).floor() as usize;
            if first >= total_bits {
                break;
            }
            let last = ((b / bit_us).ceil() as usize).min(total_bits);
            out.push((first, last));
        }
        out
    }

    fn symbol_frame(&self, frame: usize) -> FrameRecord {
        let mut rng = frame_rng(self.cfg.seed, frame);
        let gate = self.draw_gate(&mut rng);
        let payload = self.payload_range();
        let pre = PREAMBLE_BITS;

        // baseline: any lost bit kills the frame
        let lost = self.lost_bit_ranges(&gate, pre + self.frame_bits);
        let preamble_hit = lost.first().is_some_and(|&(a, _)| a < pre);
        let baseline_error = !lost.is_empty();
        let baseline_bit_errors = if preamble_hit {
            self.payload_bits()
        } else {
            lost.iter()
                .map(|&(a, b)| overlap(a - pre, b - pre, payload.start, payload.end))
                .sum()
        };

        // coded: a codeword fails once more than t of its symbols are touched
        let code = self.plan.code;
        let (n, k, m, t) = (code.n(), code.k(), code.m() as usize, code.t());
        let total = pre + self.coded_bits;
        let lost = self.lost_bit_ranges(&gate, total);
        let preamble_hit = lost.first().is_some_and(|&(a, _)| a < pre);
        let n_cw = self.coded_bits / (n * m);
        let mut touched = vec![0usize; n_cw];
        let mut last_symbol = usize::MAX;
        let mut erased_bits = 0;
        for &(a, b) in &lost {
            erased_bits += b - a;
            let (a, b) = (a.max(pre) - pre, b.max(pre) - pre);
            if a >= b {
                continue;
            }
            for s in a / m..b.div_ceil(m) {
                if s != last_symbol {
                    touched[s / n] += 1;
                    last_symbol = s;
                }
            }
        }
        let failed: Vec<bool> = touched.iter().map(|&c| c > t).collect();
        let failed_codewords = failed.iter().filter(|&&f| f).count();
        let coded_bit_errors = if preamble_hit {
            self.payload_bits()
        } else {
            let mut errs = 0;
            for &(a, b) in &lost {
                for bit in a.max(pre) - pre..b.max(pre) - pre {
                    let (cw, within) = (bit / (n * m), bit % (n * m));
                    if failed[cw] && within < k * m && payload.contains(&(cw * k * m + within)) {
                        errs += 1;
                    }
                }
            }
            errs
        };
        FrameRecord {
            frame,
            baseline_error,
            coded_error: preamble_hit || failed_codewords > 0,
            baseline_bit_errors,
            coded_bit_errors,
            erased_bits,
            failed_codewords,
        }
    }

    fn sample_frame(&self, frame: usize) -> Result<FrameRecord> {
        let mut rng = frame_rng(self.cfg.seed, frame);
        let gate = self.draw_gate(&mut rng);
        let payload: Vec<u8> = (0..self.cfg.payload_bytes).map(|_| rng.random()).collect();
        let truth = bytes_to_bits(&frame_build(&payload)?);
        let demod_cfg = DemodConfig {
            samples_per_bit: self.cfg.samples_per_bit,
            erasure_run_bits: self.cfg.erasure_run_bits,
            detect_threshold: DEFAULT_DETECT_THRESHOLD,
        };
        let spb = self.cfg.samples_per_bit;
        let sigma = self.cfg.noise_sigma;
        let range = self.payload_range();

        let tx = modulate(&whiten(&truth), spb, self.cfg.rate, 1.0)?;
        let rx = apply_channel(&tx, &gate, sigma, &mut rng)?;
        let (baseline_error, baseline_bit_errors) = match demodulate(&rx, &demod_cfg) {
            Err(_) => (true, self.payload_bits()),
            Ok(mut d) => {
                d.bits = whiten(&d.bits);
                let ok = parse_uncoded(&d.bits).as_deref() == Some(&payload[..]);
                (!ok, bit_errors(&truth, &d.bits, &d.erased, range.clone()))
            }
        };

        let coded = self.codec.encode(&payload)?;
        let tx = modulate(&whiten(&coded), spb, self.cfg.rate, 1.0)?;
        let rx = apply_channel(&tx, &gate, sigma, &mut rng)?;
        let (coded_error, coded_bit_errors, erased_bits, failed_codewords) = match demodulate(&rx, &demod_cfg) {
            Err(_) => (true, self.payload_bits(), 0, 0),
            Ok(d) => {
                let out = self.codec.decode(&whiten(&d.bits), &d.erased);
                let ok = out.payload.as_deref() == Some(&payload[..]);
                let errs = bit_errors(&truth, &out.frame_bits, &out.unreliable, range);
                (!ok, errs, d.erased.iter().filter(|&&e| e).count(), out.codewords_failed)
            }
        };
        Ok(FrameRecord {
            frame,
            baseline_error,
            coded_error,
            baseline_bit_errors,
            coded_bit_errors,
            erased_bits,
            failed_codewords,
        })
    }

    fn report(&self, mode: Mode, log: Vec<FrameRecord>) -> LinkReport {
        let frames = log.len();
        let payload_bits = self.payload_bits() as f64;
        let metrics = |errors: usize, bits: usize, airtime_bits: usize| {
            let fer = errors as f64 / frames as f64;
            LinkMetrics {
                ber: bits as f64 / (payload_bits * frames as f64),
                fer,
                throughput: payload_bits * (1.0 - fer) * self.cfg.rate / airtime_bits as f64,
                frame_errors: errors,
                bit_errors: bits,
            }
        };
        let baseline = metrics(
            log.iter().filter(|r| r.baseline_error).count(),
            log.iter().map(|r| r.baseline_bit_errors).sum(),
            PREAMBLE_BITS + self.frame_bits,
        );
        let coded = metrics(
            log.iter().filter(|r| r.coded_error).count(),
            log.iter().map(|r| r.coded_bit_errors).sum(),
            PREAMBLE_BITS + self.coded_bits,
        );
        LinkReport {
            mode,
            code: self.plan.code,
            p_s: self.plan.p_s,
            predicted_pe: self.plan.predicted_pe,
            frames,
            payload_bytes: self.cfg.payload_bytes,
            rate: self.cfg.rate,
            seed: self.cfg.seed,
            baseline,
            coded,
            frame_log: log,
        }
    }
}

fn overlap(a: usize, b: usize, lo: usize, hi: usize) -> usize {
    b.min(hi).saturating_sub(a.max(lo))
}

/// Payload bits that are wrong, flagged, or missing in `got`.
fn bit_errors(truth: &[u8], got: &[u8], flagged: &[bool], range: std::ops::Range<usize>) -> usize {
    range
        .filter(|&i| got.get(i) != Some(&truth[i]) || flagged.get(i).copied().unwrap_or(false))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::ParetoParams;

    fn config(off_mean: f64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(TrafficStats {
            on: ParetoParams::with_mean(5.0, 1024.0 / 3.0).unwrap(),
            off: ParetoParams::with_mean(5.0, off_mean).unwrap(),
        });
        cfg.frames_count = 200;
        cfg
    }

    #[test]
    fn quiet_channel_is_error_free() {
        let mut cfg = config(20.0);
        // an on run far longer than any frame
        cfg.scenario = super::super::config::Scenario::Pareto(TrafficStats {
            on: ParetoParams::new(5.0, 1e9).unwrap(),
            off: ParetoParams::new(5.0, 20.0).unwrap(),
        });
        cfg.code = CodeChoice::Fixed(RsCode::new(63, 45).unwrap());
        for mode in [Mode::Symbol, Mode::Sample] {
            cfg.mode = mode;
            let r = run(&cfg).unwrap();
            assert_eq!((r.baseline.fer, r.baseline.ber, r.coded.fer, r.coded.ber), (0.0, 0.0, 0.0, 0.0), "{mode}");
            assert!(r.coded.throughput > 0.0 && r.coded.throughput < r.baseline.throughput);
        }
    }

    #[test]
    fn symbol_level_is_reproducible_and_coding_helps() {
        let cfg = config(20.0);
        let a = run_symbol_level(&cfg).unwrap();
        let b = run_symbol_level(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.coded.fer <= a.baseline.fer);
        for r in &a.frame_log {
            assert!(r.coded_bit_errors <= cfg.payload_bytes * 8);
            assert!(!r.coded_error || r.failed_codewords > 0);
        }
    }

    #[test]
    fn lost_ranges_use_positive_overlap() {
        let cfg = config(20.0);
        let ctx = Context::new(&cfg).unwrap();
        let gate = Gate::new(vec![100.5, 20.0, 50.0, 10.0, 1000.0]).unwrap();
        assert_eq!(ctx.lost_bit_ranges(&gate, 1000), vec![(100, 121), (170, 181)]);
        assert_eq!(ctx.lost_bit_ranges(&gate, 175), vec![(100, 121), (170, 175)]);
    }
}
