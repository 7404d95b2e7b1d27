use backscatter::codesearch::optimize_for_ps;
use backscatter::harness::{run, run_sample_level, run_symbol_level, CodeChoice, ExperimentConfig, Mode};
use backscatter::rscodec::RsCode;
use backscatter::traffic::{ParetoParams, TrafficStats};
use proptest::prelude::*;

fn config(off_mean: f64, frames: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(TrafficStats {
        on: ParetoParams::with_mean(5.0, 1024.0 / 3.0).unwrap(),
        off: ParetoParams::with_mean(5.0, off_mean).unwrap(),
    });
    cfg.frames_count = frames;
    cfg.seed = 41;
    cfg
}

#[test]
fn reports_repeat_exactly() {
    for mode in [Mode::Symbol, Mode::Sample] {
        let mut cfg = config(40.0, 200);
        cfg.mode = mode;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.frame_log_csv(), b.frame_log_csv());
    }
}

#[test]
fn coding_never_loses_to_the_baseline() {
    for off in [20.0, 40.0, 60.0] {
        let r = run_symbol_level(&config(off, 1000)).unwrap();
        assert!(r.coded.fer <= r.baseline.fer, "{off} us: {} > {}", r.coded.fer, r.baseline.fer);
        assert!(r.coded.ber <= r.baseline.ber);
    }
}

#[test]
fn longer_silences_hurt_a_fixed_code() {
    let fer = |off: f64| {
        let mut cfg = config(off, 2000);
        cfg.code = CodeChoice::Fixed(RsCode::new(127, 95).unwrap());
        run_symbol_level(&cfg).unwrap().coded.fer
    };
    assert!(fer(20.0) < fer(60.0));
}

#[test]
fn modes_agree_on_the_uncoded_frame() {
    // the uncoded frame fails in both modes exactly when the gate cuts it
    let mut cfg = config(40.0, 300);
    cfg.code = CodeChoice::Fixed(RsCode::new(63, 29).unwrap());
    let symbol = run_symbol_level(&cfg).unwrap();
    let sample = run_sample_level(&cfg).unwrap();
    let baseline = |r: &backscatter::harness::LinkReport| r.frame_log.iter().map(|f| f.baseline_error).collect::<Vec<_>>();
    assert_eq!(baseline(&symbol), baseline(&sample));
    assert!(sample.coded.fer < sample.baseline.fer);
}

proptest! {
    #[test]
    fn tighter_budget_never_raises_the_rate(p_s in 0.0f64..0.3, a in -9.0f64..-1.0, b in -9.0f64..-1.0) {
        let (loose, tight) = (10f64.powf(a.max(b)), 10f64.powf(a.min(b)));
        if let Ok(strict) = optimize_for_ps(p_s, tight) {
            let relaxed = optimize_for_ps(p_s, loose).unwrap();
            prop_assert!(strict.code.rate() <= relaxed.code.rate());
        }
    }
}
