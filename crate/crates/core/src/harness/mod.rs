//! Experiment configuration, Monte Carlo runners and sweeps.

pub mod config;
pub mod run;
pub mod sweep;

pub use config::{CodeChoice, ExperimentConfig, Mode, Scenario};
pub use run::{plan_code, run, run_sample_level, run_symbol_level, CodePlan, FrameRecord, LinkMetrics, LinkReport};
pub use sweep::{sweep_csv, sweep_parity, sweep_silent_duration, SweepRow, SWEEP_HEADER};
