//! Command-line front end: argument parsing, run configuration, and output files.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{
    cmd_classical_sim, cmd_density, cmd_oracle_check, cmd_sample, cmd_variance_table, run, Report,
};
pub use config::{CommandConfig, Format, OscillatorInput, RunConfig, TemperatureInput};
pub use output::{parse_config_echo, read_config_echo, Cell, Check, Table};

use crate::sampling::SamplingRegime;
use crate::thermal::{DEFAULT_GRID_POINTS, DEFAULT_GRID_SIGMAS};
use config::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

/// Exit status for runs whose validations did not all pass.
pub const EXIT_VALIDATION_FAILED: i32 = 1;
/// Exit status for invalid configuration or I/O failure.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "thermosc",
    version,
    about = "Position densities and variance of a harmonic oscillator in a heat bath"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermal, ground-state and classical densities on a grid, one file per temperature
    Density(DensityArgs),
    /// Variance, its two limits and the classical/zero-point ratio per temperature
    VarianceTable(VarianceArgs),
    /// Velocity-Verlet histogram of a single orbit against the arcsine density
    ClassicalSim(SimArgs),
    /// Monte Carlo samples with moment and KS checks
    Sample(SampleArgs),
    /// Compare the eigenstate sum with the closed-form thermal density
    OracleCheck(OracleArgs),
    /// Re-run the configuration echoed at the top of an output file
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OscillatorArgs {
    /// Reduced mass in amu (molecular units)
    #[arg(long, requires = "wavenumber_cm1", conflicts_with_all = ["alpha", "preset"])]
    pub mass_amu: Option<f64>,
    /// Vibrational wavenumber in cm⁻¹ (molecular units)
    #[arg(long, requires = "mass_amu")]
    pub wavenumber_cm1: Option<f64>,
    /// Width parameter α in reduced units (default 1)
    #[arg(long, conflicts_with = "preset")]
    pub alpha: Option<f64>,
    /// TOML file with named presets
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Preset name from --config, e.g. bond.CH
    #[arg(long, requires = "config")]
    pub preset: Option<String>,
    /// Temperatures in kelvin (comma separated; molecular units only)
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "theta")]
    pub temperature_k: Vec<f64>,
    /// Coldness values θ = ħω/k_BT (comma separated; default 1)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub theta: Vec<f64>,
}

impl OscillatorArgs {
    fn resolve(&self) -> Result<(OscillatorInput, TemperatureInput), CliError> {
        let oscillator = if let Some(name) = &self.preset {
            let path = self.config.as_deref().expect("clap enforces --config");
            let p = load_preset(path, name)?;
            OscillatorInput::Molecular {
                mass_amu: p.mass_amu,
                wavenumber_cm1: p.wavenumber_cm1,
                preset: Some(name.clone()),
            }
        } else if let (Some(mass_amu), Some(wavenumber_cm1)) = (self.mass_amu, self.wavenumber_cm1)
        {
            OscillatorInput::Molecular {
                mass_amu,
                wavenumber_cm1,
                preset: None,
            }
        } else {
            OscillatorInput::Reduced {
                alpha: self.alpha.unwrap_or(1.0),
            }
        };
        let temperatures = if !self.temperature_k.is_empty() {
            TemperatureInput::Kelvin(self.temperature_k.clone())
        } else if !self.theta.is_empty() {
            TemperatureInput::Theta(self.theta.clone())
        } else {
            TemperatureInput::Theta(vec![1.0])
        };
        Ok((oscillator, temperatures))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Grid points over ±sigmas·σ
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_SIGMAS)]
    pub sigmas: f64,
    /// Add the truncated eigenstate sum and its deviation from the closed form
    #[arg(long)]
    pub oracle: bool,
    /// Limit on the oracle deviation
    #[arg(long, default_value_t = DEFAULT_ORACLE_TOL)]
    pub tol: f64,
    /// Limit on |∫P_T − 1| over the emitted grid
    #[arg(long, default_value_t = DEFAULT_NORMALIZATION_TOL)]
    pub normalization_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VarianceArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Orbit amplitude in reduced length units
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = DEFAULT_SIM_STEPS)]
    pub steps: u64,
    #[arg(long, default_value_t = DEFAULT_SIM_BINS)]
    pub bins: usize,
    /// Time step as a fraction of the period: dt = period / steps_per_period
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_PERIOD)]
    pub steps_per_period: f64,
    /// Bins left out of the comparison at each turning point
    #[arg(long, default_value_t = 2)]
    pub exclude_bins: usize,
    #[arg(long, default_value_t = DEFAULT_SIM_MAX_DEVIATION)]
    pub max_deviation: f64,
    #[arg(long, default_value_t = DEFAULT_SIM_MAX_DRIFT)]
    pub max_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Quantum,
    Classical,
    Microcanonical,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value_t = RegimeArg::All)]
    pub regime: RegimeArg,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Orbit amplitude for microcanonical sampling (reduced length units)
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Also write the raw samples
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = DEFAULT_ORACLE_THETAS)]
    pub theta: Vec<f64>,
    /// Width parameters α in reduced units
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = DEFAULT_ORACLE_ALPHAS)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_SIGMAS)]
    pub sigmas: f64,
    #[arg(long, default_value_t = DEFAULT_ORACLE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// An output file produced by an earlier run
    pub file: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl Command {
    /// The run configuration and output directory this invocation stands for.
    pub fn into_config(self) -> Result<(RunConfig, PathBuf), CliError> {
        let (config, out) = match self {
            Command::Density(a) => {
                let (osc, temps) = a.oscillator.resolve()?;
                let cmd = CommandConfig::Density {
                    grid: a.grid,
                    sigmas: a.sigmas,
                    oracle: a.oracle,
                    tol: a.tol,
                    normalization_tol: a.normalization_tol,
                };
                (
                    RunConfig::new(cmd, osc, temps, a.output.format),
                    a.output.out,
                )
            }
            Command::VarianceTable(a) => {
                let (osc, temps) = a.oscillator.resolve()?;
                (
                    RunConfig::new(CommandConfig::VarianceTable, osc, temps, a.output.format),
                    a.output.out,
                )
            }
            Command::ClassicalSim(a) => {
                let (osc, temps) = a.oscillator.resolve()?;
                let cmd = CommandConfig::ClassicalSim {
                    amplitude: a.amplitude,
                    steps: a.steps,
                    bins: a.bins,
                    steps_per_period: a.steps_per_period,
                    exclude_bins: a.exclude_bins,
                    max_deviation: a.max_deviation,
                    max_drift: a.max_drift,
                };
                (
                    RunConfig::new(cmd, osc, temps, a.output.format),
                    a.output.out,
                )
            }
            Command::Sample(a) => {
                let (osc, temps) = a.oscillator.resolve()?;
                let regimes = match a.regime {
                    RegimeArg::Quantum => vec![SamplingRegime::Quantum],
                    RegimeArg::Classical => vec![SamplingRegime::ClassicalCanonical],
                    RegimeArg::Microcanonical => vec![SamplingRegime::Microcanonical],
                    RegimeArg::All => vec![
                        SamplingRegime::Quantum,
                        SamplingRegime::ClassicalCanonical,
                        SamplingRegime::Microcanonical,
                    ],
                };
                let cmd = CommandConfig::Sample {
                    regimes,
                    count: a.count,
                    seed: a.seed,
                    amplitude: a.amplitude,
                    raw: a.raw,
                };
                (
                    RunConfig::new(cmd, osc, temps, a.output.format),
                    a.output.out,
                )
            }
            Command::OracleCheck(a) => {
                let cmd = CommandConfig::OracleCheck {
                    alphas: a.alpha,
                    grid: a.grid,
                    sigmas: a.sigmas,
                    tol: a.tol,
                };
                (
                    RunConfig::new(
                        cmd,
                        OscillatorInput::Reduced { alpha: 1.0 },
                        TemperatureInput::Theta(a.theta),
                        a.output.format,
                    ),
                    a.output.out,
                )
            }
            Command::Replay(a) => (read_config_echo(&a.file)?, a.out),
        };
        Ok((config, out))
    }
}

/// Files written by a run and whether every validation passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Run `config` and write its tables into `out`.
pub fn execute(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let report = run(config)?;
    let files = report
        .tables
        .iter()
        .map(|t| t.write(out, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome {
        files,
        checks: report.checks().cloned().collect(),
        passed: report.passed(),
    })
}

/// Parse `args`, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = cli
        .command
        .into_config()
        .and_then(|(config, out)| execute(&config, &out));
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            for c in &outcome.checks {
                println!(
                    "{} {} = {:e} (limit {:e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.limit
                );
            }
            if outcome.passed {
                0
            } else {
                EXIT_VALIDATION_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
