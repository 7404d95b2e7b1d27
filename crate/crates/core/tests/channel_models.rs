use backscatter::channel::{
    erasure_mask_from_gate, erasure_mask_markov, gate_durations, post_decode_error_rate, MarkovChannel,
};
use backscatter::rscodec::RsCode;
use backscatter::traffic::{ParetoParams, TrafficStats};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mean_run(mask: &[bool]) -> f64 {
    let runs = backscatter::channel::ErasureMask { erased: mask.to_vec() }.burst_lengths();
    // the last run may be cut short by the horizon
    let runs = &runs[..runs.len() - 1];
    runs.iter().sum::<usize>() as f64 / runs.len() as f64
}

#[test]
fn chain_occupancy_matches_stationary_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ch = MarkovChannel::new(0.2, 0.3, 1e6).unwrap();
    let mask = erasure_mask_markov(&mut rng, &ch, 10_000_000);
    let p = ch.symbol_error_rate().unwrap();
    assert!((mask.fraction() - p).abs() / p < 0.01, "{} vs {p}", mask.fraction());
    assert!((mean_run(&mask.erased) - 1.0 / 0.3).abs() * 0.3 < 0.02);
}

#[test]
fn slow_chain_sojourns() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let ch = MarkovChannel::new(1.0 / 300.0, 1.0 / 30.0, 1e6).unwrap();
    assert!((ch.symbol_error_rate().unwrap() - 1.0 / 11.0).abs() < 1e-12);
    let mask = erasure_mask_markov(&mut rng, &ch, 10_000_000);
    let m = mean_run(&mask.erased);
    assert!((m - 30.0).abs() / 30.0 < 0.02, "mean off run {m}");
}

#[test]
fn memoryless_blocks_follow_binomial_tail() {
    // alpha + beta = 1 makes successive symbols independent
    let ch = MarkovChannel::new(0.05, 0.95, 1e6).unwrap();
    let code = RsCode::new(15, 7).unwrap();
    let blocks = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mask = erasure_mask_markov(&mut rng, &ch, blocks * 15);
    let failed = mask.erased.chunks(15).filter(|b| b.iter().filter(|&&e| e).count() > code.t()).count();
    let closed = post_decode_error_rate(code, 0.05);
    let measured = failed as f64 / blocks as f64;
    let sd = (closed * (1.0 - closed) / blocks as f64).sqrt();
    assert!((measured - closed).abs() <= 3.0 * sd, "{measured} vs {closed}");
}

#[test]
fn gate_mask_fraction_matches_renewal_and_chain() {
    let stats = TrafficStats {
        on: ParetoParams::with_mean(5.0, 300.0).unwrap(),
        off: ParetoParams::with_mean(5.0, 30.0).unwrap(),
    };
    let renewal = 30.0 / 330.0;
    // a finer symbol grid keeps the partial-overlap edges negligible
    let rate = 1e7;
    let total_us = 4e6;
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let gate = gate_durations(&mut rng, &stats, total_us);
    let mask = erasure_mask_from_gate(&gate, rate, (total_us * rate / 1e6) as usize).unwrap();
    assert!((mask.fraction() - renewal).abs() / renewal < 0.02, "{} vs {renewal}", mask.fraction());

    let p_s = MarkovChannel::from_stats(&stats, rate).unwrap().symbol_error_rate().unwrap();
    assert!((p_s - renewal).abs() < 1e-12);
}
