use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use backscatter::channel::gate_durations;
use backscatter::codesearch::{brute_force_search, optimize_code, optimize_for_ps, DEFAULT_PE_THRESHOLD};
use backscatter::harness::{run, sweep_csv, sweep_parity, sweep_silent_duration, ExperimentConfig, Mode};
use backscatter::traffic::{load_trace, DurationTrace, ExcitationState, ParetoParams, TrafficStats};
use backscatter::{Error, Result};

#[derive(Parser)]
#[command(name = "backscatter", version, about = "Burst-erasure coding simulator for backscatter links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit Pareto laws to an on/off trace and print them as JSON.
    Fit { trace: PathBuf },
    /// Pick the highest-rate RS code that meets the error budget.
    Optimize {
        /// Trace to fit; otherwise give the Pareto parameters.
        trace: Option<PathBuf>,
        #[command(flatten)]
        params: ParetoArgs,
        /// Bit rate in bits per second.
        #[arg(long, default_value_t = 1e6)]
        rate: f64,
        #[arg(long = "pe-th", default_value_t = DEFAULT_PE_THRESHOLD)]
        pe_th: f64,
        /// Score every admissible code instead of the per-length scan.
        #[arg(long)]
        brute_force: bool,
    },
    /// Run one Monte Carlo experiment and print the report as JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also write the per-frame outcome log here.
        #[arg(long)]
        frames_csv: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Repeat the experiment over a parameter range and print CSV.
    Sweep {
        #[arg(long, value_enum)]
        vary: Vary,
        #[arg(long)]
        config: PathBuf,
        /// Mean off durations in microseconds for the silent-duration sweep.
        #[arg(long, value_delimiter = ',', default_value = "20,40,60")]
        values: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw a synthetic on/off trace from Pareto laws.
    GenTrace {
        #[command(flatten)]
        params: ParetoArgs,
        #[arg(long = "total-us")]
        total_us: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ParetoArgs {
    #[arg(long)]
    on_shape: Option<f64>,
    #[arg(long)]
    on_scale_us: Option<f64>,
    #[arg(long, conflicts_with = "on_scale_us")]
    on_mean_us: Option<f64>,
    #[arg(long)]
    off_shape: Option<f64>,
    #[arg(long)]
    off_scale_us: Option<f64>,
    #[arg(long, conflicts_with = "off_scale_us")]
    off_mean_us: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Vary {
    Parity,
    SilentDuration,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Symbol,
    Sample,
}

impl ParetoArgs {
    fn state(name: &str, shape: Option<f64>, scale: Option<f64>, mean: Option<f64>) -> Result<ParetoParams> {
        let shape = shape.ok_or_else(|| Error::Config(format!("missing --{name}-shape")))?;
        match (scale, mean) {
            (Some(s), _) => ParetoParams::new(shape, s),
            (None, Some(m)) => ParetoParams::with_mean(shape, m),
            (None, None) => Err(Error::Config(format!("missing --{name}-scale-us or --{name}-mean-us"))),
        }
    }

    fn stats(&self) -> Result<TrafficStats> {
        Ok(TrafficStats {
            on: Self::state("on", self.on_shape, self.on_scale_us, self.on_mean_us)?,
            off: Self::state("off", self.off_shape, self.off_scale_us, self.off_mean_us)?,
        })
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { trace } => {
            let stats = TrafficStats::fit(&load_trace(&trace)?)?;
            print!("{}", json(&stats));
        }
        Command::Optimize { trace, params, rate, pe_th, brute_force } => {
            let stats = match trace {
                Some(path) => TrafficStats::fit(&load_trace(path)?)?,
                None => params.stats()?,
            };
            let outcome = if brute_force {
                let p_s = backscatter::channel::MarkovChannel::from_stats(&stats, rate)?.symbol_error_rate()?;
                brute_force_search(p_s, pe_th)?
            } else {
                optimize_code(&stats, rate, pe_th)?
            };
            debug_assert_eq!(outcome.code, optimize_for_ps(outcome.p_s, pe_th)?.code);
            print!("{}", json(&outcome));
        }
        Command::Simulate { config, frames_csv, seed, mode } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = mode {
                cfg.mode = match m {
                    ModeArg::Symbol => Mode::Symbol,
                    ModeArg::Sample => Mode::Sample,
                };
            }
            let report = run(&cfg)?;
            if let Some(path) = frames_csv {
                std::fs::write(path, report.frame_log_csv())?;
            }
            print!("{}", json(&report));
        }
        Command::Sweep { vary, config, values, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = match vary {
                Vary::Parity => sweep_parity(&cfg)?,
                Vary::SilentDuration => sweep_silent_duration(&cfg, &values)?,
            };
            emit(&sweep_csv(&rows), output.as_ref())?;
        }
        Command::GenTrace { params, total_us, seed, output } => {
            if !(total_us.is_finite() && total_us > 0.0) {
                return Err(Error::Config(format!("--total-us must be positive, got {total_us}")));
            }
            let stats = params.stats()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gate = gate_durations(&mut rng, &stats, total_us);
            let trace = DurationTrace::from_alternating(ExcitationState::On, gate.durations())?;
            emit(&trace.to_csv(), output.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
