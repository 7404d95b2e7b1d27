//! Unipolar NRZ on-off keying at sample level.
//!
//! The receiver works on power `sqrt(I^2 + Q^2)`, smoothed by a one-bit
//! moving average. The frame start is the first correlation peak against
//! the preamble, the slicing threshold is set from the preamble itself, and
//! long runs of low-power bits are flagged as erasures since OOK cannot tell
//! a string of zeros from an absent carrier.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::Gate;
use crate::error::{Error, Result};

/// 24 alternating bits for detection, then a 12-bit sync word.
pub const PREAMBLE: [u8; 36] = [
    1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, //
    1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1,
];
pub const PREAMBLE_BITS: usize = PREAMBLE.len();

pub const DEFAULT_SAMPLES_PER_BIT: usize = 8;
pub const MIN_SAMPLES_PER_BIT: usize = 4;
pub const DEFAULT_ERASURE_RUN_BITS: usize = 16;
/// Minimum normalized preamble correlation for a detection.
pub const DEFAULT_DETECT_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStream {
    pub i: Vec<f64>,
    pub q: Vec<f64>,
    pub sample_rate: f64,
    pub samples_per_bit: usize,
}

impl SampleStream {
    pub fn len(&self) -> usize {
        self.i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty()
    }

    pub fn power(&self) -> Vec<f64> {
        self.i.iter().zip(&self.q).map(|(i, q)| i.hypot(*q)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            i: self.i.iter().map(|x| x * factor).collect(),
            q: self.q.iter().map(|x| x * factor).collect(),
            ..self.clone()
        }
    }

    /// Prepend `count` zero samples.
    pub fn delayed(&self, count: usize) -> Self {
        let pad = |v: &[f64]| std::iter::repeat_n(0.0, count).chain(v.iter().copied()).collect();
        Self { i: pad(&self.i), q: pad(&self.q), ..self.clone() }
    }
}

fn check_spb(spb: usize) -> Result<()> {
    if spb < MIN_SAMPLES_PER_BIT {
        return Err(Error::param(format!("samples_per_bit {spb} < {MIN_SAMPLES_PER_BIT}")));
    }
    Ok(())
}

/// Preamble followed by `bits`, each bit held for `samples_per_bit` samples
/// at `amplitude` (1) or zero (0). `bit_rate` fixes the sample rate.
pub fn modulate(bits: &[u8], samples_per_bit: usize, bit_rate: f64, amplitude: f64) -> Result<SampleStream> {
    check_spb(samples_per_bit)?;
    let i: Vec<f64> = PREAMBLE
        .iter()
        .chain(bits)
        .flat_map(|&b| std::iter::repeat_n(if b != 0 { amplitude } else { 0.0 }, samples_per_bit))
        .collect();
    let q = vec![0.0; i.len()];
    Ok(SampleStream { i, q, sample_rate: bit_rate * samples_per_bit as f64, samples_per_bit })
}

/// Zero every sample whose interval touches an off run of `gate` (which
/// starts at the first sample), then add white Gaussian noise of standard
/// deviation `noise_sigma` to I and Q.
pub fn apply_channel<R: Rng + ?Sized>(
    stream: &SampleStream,
    gate: &Gate,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<SampleStream> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::param(format!("noise sigma {noise_sigma} must be >= 0")));
    }
    let lost = gate.lost_slots(0.0, 1e6 / stream.sample_rate, stream.len())?;
    let mut out = stream.clone();
    for (j, &l) in lost.iter().enumerate() {
        if l {
            out.i[j] = 0.0;
            out.q[j] = 0.0;
        }
    }
    if noise_sigma > 0.0 {
        for j in 0..out.len() {
            let ni: f64 = StandardNormal.sample(rng);
            let nq: f64 = StandardNormal.sample(rng);
            out.i[j] += noise_sigma * ni;
            out.q[j] += noise_sigma * nq;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemodConfig {
    pub samples_per_bit: usize,
    /// Below-threshold runs longer than this many bits are flagged erased.
    pub erasure_run_bits: usize,
    pub detect_threshold: f64,
}

impl Default for DemodConfig {
    fn default() -> Self {
        Self {
            samples_per_bit: DEFAULT_SAMPLES_PER_BIT,
            erasure_run_bits: DEFAULT_ERASURE_RUN_BITS,
            detect_threshold: DEFAULT_DETECT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    pub bits: Vec<u8>,
    pub erased: Vec<bool>,
    /// Slicing threshold on matched-filter output.
    pub threshold: f64,
    /// Sample index just past the preamble.
    pub preamble_end: usize,
    pub peak_correlation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no frame detected")]
pub struct NoFrame;

/// `out[j]` is the mean power over samples `j..j+spb`.
pub fn matched_filter(power: &[f64], spb: usize) -> Vec<f64> {
    if power.len() < spb {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(power.len() - spb + 1);
    let mut acc: f64 = power[..spb].iter().sum();
    out.push(acc / spb as f64);
    for j in spb..power.len() {
        acc += power[j] - power[j - spb];
        out.push(acc / spb as f64);
    }
    out
}

/// Pearson correlation of the bit-spaced filter outputs starting at `s`
/// with the preamble pattern; 0 when either side is constant.
fn preamble_correlation(mf: &[f64], s: usize, spb: usize) -> f64 {
    const MEAN_B: f64 = 18.0 / 36.0;
    let n = PREAMBLE_BITS as f64;
    let xs = (0..PREAMBLE_BITS).map(|b| mf[s + b * spb]);
    let mean_x = xs.clone().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, &b) in xs.zip(PREAMBLE.iter()) {
        let dx = x - mean_x;
        sxy += dx * (b as f64 - MEAN_B);
        sxx += dx * dx;
    }
    let syy = n * 0.25;
    if sxx <= f64::EPSILON * f64::EPSILON * n {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn demodulate(stream: &SampleStream, cfg: &DemodConfig) -> Result<Demodulated, NoFrame> {
    let spb = cfg.samples_per_bit;
    let mf = matched_filter(&stream.power(), spb);
    if mf.len() < (PREAMBLE_BITS - 1) * spb + 1 {
        return Err(NoFrame);
    }
    let last_start = mf.len() - 1 - (PREAMBLE_BITS - 1) * spb;

    // first offset over the threshold, then the peak within the next bit
    let first = (0..=last_start)
        .find(|&s| preamble_correlation(&mf, s, spb) >= cfg.detect_threshold)
        .ok_or(NoFrame)?;
    let (start, peak) = (first..=last_start.min(first + spb))
        .map(|s| (s, preamble_correlation(&mf, s, spb)))
        .fold((first, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });

    let pre = |b: usize| mf[start + b * spb];
    let min_one = (0..PREAMBLE_BITS).filter(|&b| PREAMBLE[b] == 1).map(pre).fold(f64::INFINITY, f64::min);
    let max_zero = (0..PREAMBLE_BITS).filter(|&b| PREAMBLE[b] == 0).map(pre).fold(f64::NEG_INFINITY, f64::max);
    let threshold = 0.5 * (min_one + max_zero);

    let preamble_end = start + PREAMBLE_BITS * spb;
    let n_bits = mf.len().saturating_sub(preamble_end).div_ceil(spb);
    let bits: Vec<u8> = (0..n_bits).map(|b| u8::from(mf[preamble_end + b * spb] > threshold)).collect();

    let mut erased = vec![false; n_bits];
    let mut run_start = 0;
    for b in 0..=n_bits {
        if b < n_bits && bits[b] == 0 {
            continue;
        }
        if b - run_start > cfg.erasure_run_bits {
            erased[run_start..b].iter_mut().for_each(|e| *e = true);
        }
        run_start = b + 1;
    }
    Ok(Demodulated { bits, erased, threshold, preamble_end, peak_correlation: peak })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn preamble_shape() {
        assert_eq!(PREAMBLE.iter().filter(|&&b| b == 1).count(), 18);
        let s: String = PREAMBLE.iter().map(|b| char::from(b'0' + b)).collect();
        assert_eq!(s, "101010101010101010101010110100100011");
    }

    #[test]
    fn modulated_length_and_levels() {
        let s = modulate(&[1; 10], 8, 1e6, 1.0).unwrap();
        assert_eq!(s.len(), (36 + 10) * 8);
        assert!(s.i[36 * 8..].iter().all(|&x| x == 1.0));
        assert_eq!(s.sample_rate, 8e6);
        assert!(modulate(&[1], 3, 1e6, 1.0).is_err());
    }

    #[test]
    fn clean_loopback() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spb in [4, 8, 13] {
            let bits = random_bits(&mut rng, 500);
            let s = modulate(&bits, spb, 1e6, 1.0).unwrap();
            let cfg = DemodConfig { samples_per_bit: spb, ..Default::default() };
            let d = demodulate(&s, &cfg).unwrap();
            assert_eq!(d.preamble_end, 36 * spb);
            assert_eq!(d.bits, bits);
            assert!(d.erased.iter().all(|e| !e));
        }
    }

    #[test]
    fn preamble_found_at_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let bits = random_bits(&mut rng, 300);
        let s = modulate(&bits, 8, 1e6, 1.0).unwrap().delayed(1234);
        let gate = Gate::always_on(1e9);
        let noisy = apply_channel(&s, &gate, 0.05, &mut rng).unwrap();
        let d = demodulate(&noisy, &DemodConfig::default()).unwrap();
        assert!(d.preamble_end.abs_diff(1234 + 36 * 8) <= 1, "{}", d.preamble_end);
        assert_eq!(&d.bits[..300], &bits[..]);
    }

    #[test]
    fn silence_is_no_frame() {
        let s = SampleStream { i: vec![0.0; 4000], q: vec![0.0; 4000], sample_rate: 8e6, samples_per_bit: 8 };
        assert_eq!(demodulate(&s, &DemodConfig::default()), Err(NoFrame));
        let short = modulate(&[], 8, 1e6, 1.0).unwrap();
        let cut = SampleStream { i: short.i[..100].to_vec(), q: short.q[..100].to_vec(), ..short };
        assert_eq!(demodulate(&cut, &DemodConfig::default()), Err(NoFrame));
    }

    #[test]
    fn channel_identity_and_blackout() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = modulate(&random_bits(&mut rng, 64), 8, 1e6, 1.0).unwrap();
        assert_eq!(apply_channel(&s, &Gate::always_on(1000.0), 0.0, &mut rng).unwrap(), s);
        let off = Gate::new(vec![1e-9, 1000.0]).unwrap();
        let dark = apply_channel(&s, &off, 0.0, &mut rng).unwrap();
        assert!(dark.i.iter().all(|&x| x == 0.0));
        assert!(apply_channel(&s, &Gate::always_on(10.0), 0.0, &mut rng).is_err());
    }

    #[test]
    fn off_run_is_flagged() {
        let bits = vec![1u8; 400];
        let s = modulate(&bits, 8, 1e6, 1.0).unwrap();
        // 60 us off starting 100 bits into the payload
        let gate = Gate::new(vec![136.0, 60.0, 1000.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = demodulate(&apply_channel(&s, &gate, 0.0, &mut rng).unwrap(), &DemodConfig::default()).unwrap();
        let flagged: Vec<usize> = (0..400).filter(|&b| d.erased[b]).collect();
        assert_eq!(flagged, (100..160).collect::<Vec<_>>());
    }

    #[test]
    fn short_zero_runs_are_not_flagged() {
        let mut bits = vec![1u8; 100];
        bits[10..26].iter_mut().for_each(|b| *b = 0);
        let d = demodulate(&modulate(&bits, 8, 1e6, 1.0).unwrap(), &DemodConfig::default()).unwrap();
        assert!(d.erased.iter().all(|e| !e));
        bits[10..27].iter_mut().for_each(|b| *b = 0);
        let d = demodulate(&modulate(&bits, 8, 1e6, 1.0).unwrap(), &DemodConfig::default()).unwrap();
        assert_eq!(d.erased.iter().filter(|&&e| e).count(), 17);
    }
}
