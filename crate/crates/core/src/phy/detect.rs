//! Frame detection from the autocorrelation of the alternating preamble head.
//!
//! Over a window of the matched-filter output, an alternating 1010 pattern
//! correlates positively with itself two bits later and negatively one bit
//! later. The score `(r(2 spb) - r(spb)) / (2 r(0))` is close to one inside
//! the preamble head and near zero for noise or random data.

use super::modem::{matched_filter, SampleStream};

pub const DEFAULT_AUTODETECT_THRESHOLD: f64 = 0.8;

/// Windowed alternation score for every window start with room for both lags.
pub fn alternation_scores(stream: &SampleStream, window: usize) -> Vec<f64> {
    let spb = stream.samples_per_bit;
    let x = matched_filter(&stream.power(), spb);
    let lag2 = 2 * spb;
    if window == 0 || x.len() < window + lag2 {
        return Vec::new();
    }
    let prefix = |f: &dyn Fn(usize) -> f64, len: usize| {
        let mut p = vec![0.0; len + 1];
        for j in 0..len {
            p[j + 1] = p[j] + f(j);
        }
        p
    };
    let len = x.len() - lag2;
    let s = prefix(&|j| x[j], x.len());
    let s00 = prefix(&|j| x[j] * x[j], len);
    let s01 = prefix(&|j| x[j] * x[j + spb], len);
    let s02 = prefix(&|j| x[j] * x[j + lag2], len);

    let w = window as f64;
    (0..=len - window)
        .map(|j| {
            let sum = |p: &[f64], off: usize| p[j + off + window] - p[j + off];
            let mean = sum(&s, 0) / w;
            // sum over the window of (x_u - mean)(x_{u+lag} - mean)
            let cov = |prod: &[f64], lag: usize| sum(prod, 0) - mean * (sum(&s, 0) + sum(&s, lag)) + w * mean * mean;
            let r0 = cov(&s00, 0);
            if r0 <= 1e-9 * sum(&s00, 0) + f64::MIN_POSITIVE {
                return 0.0;
            }
            (cov(&s02, lag2) - cov(&s01, spb)) / (2.0 * r0)
        })
        .collect()
}

/// Sample offsets of likely frame starts. Each run of consecutive windows
/// scoring at least `threshold` yields one offset: the first window within
/// 0.05 of the run's best score, moved one bit later because the quiet gap
/// before the leading 1 reads as an extra alternation bit.
pub fn autodetect(stream: &SampleStream, window: usize, threshold: f64) -> Vec<usize> {
    let spb = stream.samples_per_bit;
    let scores = alternation_scores(stream, window);
    let mut out = Vec::new();
    let mut j = 0;
    while j < scores.len() {
        if scores[j] < threshold {
            j += 1;
            continue;
        }
        let end = (j..scores.len()).find(|&e| scores[e] < threshold).unwrap_or(scores.len());
        let best = scores[j..end].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let onset = (j..end).find(|&e| scores[e] >= best - 0.05).unwrap_or(j);
        out.push(onset + spb);
        j = end;
    }
    out
}
