//! Run configuration, its serialized echo, and named oscillator presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::sampling::SamplingRegime;
use crate::thermal::{DEFAULT_GRID_POINTS, DEFAULT_GRID_SIGMAS};
use crate::units::{self, OscillatorSpec, ThermalSpec, UnitSystem};

pub const DEFAULT_ORACLE_THETAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
pub const DEFAULT_ORACLE_ALPHAS: [f64; 3] = [0.5, 1.0, 3.0];
pub const DEFAULT_ORACLE_TOL: f64 = 1e-10;
pub const DEFAULT_NORMALIZATION_TOL: f64 = 1e-6;
pub const DEFAULT_SIM_STEPS: u64 = 10_000_000;
pub const DEFAULT_SIM_BINS: usize = 50;
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 1000.0;
pub const DEFAULT_SIM_MAX_DEVIATION: f64 = 0.02;
pub const DEFAULT_SIM_MAX_DRIFT: f64 = 1e-6;
pub const DEFAULT_SAMPLE_COUNT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum OscillatorInput {
    /// ħ = k_B = ω = 1 with the mass chosen so the width parameter is `alpha`.
    Reduced { alpha: f64 },
    Molecular {
        mass_amu: f64,
        wavenumber_cm1: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
    },
}

impl OscillatorInput {
    pub fn spec(&self) -> Result<OscillatorSpec, CliError> {
        Ok(match *self {
            OscillatorInput::Reduced { alpha } => OscillatorSpec::reduced_with_width(alpha)?,
            OscillatorInput::Molecular {
                mass_amu,
                wavenumber_cm1,
                ..
            } => OscillatorSpec::from_wavenumber(mass_amu, wavenumber_cm1)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemperatureInput {
    Theta(Vec<f64>),
    Kelvin(Vec<f64>),
}

impl TemperatureInput {
    pub fn len(&self) -> usize {
        match self {
            TemperatureInput::Theta(v) | TemperatureInput::Kelvin(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandConfig {
    Density {
        grid: usize,
        sigmas: f64,
        oracle: bool,
        tol: f64,
        normalization_tol: f64,
    },
    VarianceTable,
    ClassicalSim {
        amplitude: f64,
        steps: u64,
        bins: usize,
        steps_per_period: f64,
        exclude_bins: usize,
        max_deviation: f64,
        max_drift: f64,
    },
    Sample {
        regimes: Vec<SamplingRegime>,
        count: usize,
        seed: u64,
        amplitude: f64,
        raw: bool,
    },
    OracleCheck {
        alphas: Vec<f64>,
        grid: usize,
        sigmas: f64,
        tol: f64,
    },
}

impl CommandConfig {
    pub fn density_default() -> Self {
        CommandConfig::Density {
            grid: DEFAULT_GRID_POINTS,
            sigmas: DEFAULT_GRID_SIGMAS,
            oracle: false,
            tol: DEFAULT_ORACLE_TOL,
            normalization_tol: DEFAULT_NORMALIZATION_TOL,
        }
    }
}

/// Everything needed to reproduce a run. Serialized as the first line of
/// every output file; the output directory is deliberately not part of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    pub command: CommandConfig,
    pub oscillator: OscillatorInput,
    pub temperatures: TemperatureInput,
    pub format: Format,
}

/// One temperature point resolved into reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub oscillator: OscillatorSpec,
    pub thermal: ThermalSpec,
    /// Temperature as given (K for molecular input, reduced otherwise).
    pub input_temperature: f64,
}

impl RunConfig {
    pub fn new(
        command: CommandConfig,
        oscillator: OscillatorInput,
        temperatures: TemperatureInput,
        format: Format,
    ) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            oscillator,
            temperatures,
            format,
        }
    }

    pub fn units(&self) -> UnitSystem {
        match self.oscillator {
            OscillatorInput::Reduced { .. } => UnitSystem::Reduced,
            OscillatorInput::Molecular { .. } => UnitSystem::Molecular,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.temperatures.is_empty() {
            return Err(CliError::Usage("temperature list is empty".into()));
        }
        if matches!(
            (&self.oscillator, &self.temperatures),
            (OscillatorInput::Reduced { .. }, TemperatureInput::Kelvin(_))
        ) {
            return Err(CliError::Usage(
                "--temperature-k needs a molecular oscillator (--mass-amu/--wavenumber-cm1 or --preset); use --theta in reduced units"
                    .into(),
            ));
        }
        match &self.command {
            CommandConfig::Density {
                grid, sigmas, tol, ..
            }
            | CommandConfig::OracleCheck {
                grid, sigmas, tol, ..
            } => {
                if *grid < 2 {
                    return Err(CliError::Usage(format!(
                        "grid needs at least 2 points, got {grid}"
                    )));
                }
                units::positive_finite("grid sigmas", *sigmas)?;
                units::positive_finite("tolerance", *tol)?;
            }
            CommandConfig::Sample { count, regimes, .. } => {
                if *count == 0 {
                    return Err(CliError::Usage("--count must be at least 1".into()));
                }
                if regimes.is_empty() {
                    return Err(CliError::Usage("no sampling regime selected".into()));
                }
            }
            CommandConfig::ClassicalSim {
                steps_per_period, ..
            } => {
                units::positive_finite("steps per period", *steps_per_period)?;
            }
            CommandConfig::VarianceTable => {}
        }
        if let CommandConfig::OracleCheck { alphas, .. } = &self.command {
            if alphas.is_empty() {
                return Err(CliError::Usage("--alpha list is empty".into()));
            }
        }
        Ok(())
    }

    /// Oscillator and temperatures converted to reduced units, in input order.
    pub fn resolve(&self) -> Result<Vec<Resolved>, CliError> {
        let units = self.units();
        let spec = self.oscillator.spec()?;
        let (values, by_theta) = match &self.temperatures {
            TemperatureInput::Theta(v) => (v, true),
            TemperatureInput::Kelvin(v) => (v, false),
        };
        values
            .iter()
            .map(|&value| {
                let thermal = if by_theta {
                    ThermalSpec::from_theta(value, &spec)?
                } else {
                    ThermalSpec::from_temperature(value, &spec)?
                };
                let (oscillator, reduced) = units::to_reduced(&spec, &thermal, units)?;
                Ok(Resolved {
                    oscillator,
                    thermal: reduced,
                    input_temperature: thermal.temperature(),
                })
            })
            .collect()
    }
}

/// A named oscillator from a presets file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub mass_amu: f64,
    pub wavenumber_cm1: f64,
}

/// Look up a dotted preset name such as `bond.CH` in a TOML presets file:
///
/// ```toml
/// [bond.CH]
/// mass_amu = 0.9299
/// wavenumber_cm1 = 2900.0
/// ```
pub fn load_preset(path: &Path, name: &str) -> Result<Preset, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_preset(&text, name)
}

pub fn parse_preset(text: &str, name: &str) -> Result<Preset, CliError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Parse(format!("presets file: {e}")))?;
    let mut node = toml::Value::Table(table);
    for part in name.split('.') {
        node = match node {
            toml::Value::Table(mut t) => t
                .remove(part)
                .ok_or_else(|| CliError::Usage(format!("preset `{name}` not found")))?,
            _ => return Err(CliError::Usage(format!("preset `{name}` not found"))),
        };
    }
    node.try_into()
        .map_err(|e| CliError::Parse(format!("preset `{name}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRESETS: &str = r#"
[bond.CH]
mass_amu = 0.9299
wavenumber_cm1 = 2900.0

[bond.CC]
mass_amu = 6.0
wavenumber_cm1 = 1000.0
"#;

    #[test]
    fn presets_resolve_by_dotted_name() {
        let p = parse_preset(PRESETS, "bond.CH").unwrap();
        assert_eq!(
            p,
            Preset {
                mass_amu: 0.9299,
                wavenumber_cm1: 2900.0
            }
        );
        assert!(parse_preset(PRESETS, "bond.OH").is_err());
        assert!(parse_preset(PRESETS, "bond.CH.mass_amu").is_err());
        assert!(parse_preset("not = [toml", "bond.CH").is_err());
    }

    #[test]
    fn config_echo_round_trips() {
        let cfg = RunConfig::new(
            CommandConfig::Sample {
                regimes: vec![SamplingRegime::Quantum, SamplingRegime::Microcanonical],
                count: 10,
                seed: 7,
                amplitude: 1.5,
                raw: true,
            },
            OscillatorInput::Molecular {
                mass_amu: 0.9299,
                wavenumber_cm1: 2900.0,
                preset: Some("bond.CH".into()),
            },
            TemperatureInput::Kelvin(vec![100.0, 300.0]),
            Format::Json,
        );
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::new(
            CommandConfig::density_default(),
            OscillatorInput::Reduced { alpha: 1.0 },
            TemperatureInput::Theta(vec![1.0]),
            Format::Csv,
        );
        assert!(cfg.validate().is_ok());
        cfg.temperatures = TemperatureInput::Kelvin(vec![300.0]);
        assert!(cfg.validate().is_err());
        cfg.temperatures = TemperatureInput::Theta(vec![]);
        assert!(cfg.validate().is_err());
        cfg.temperatures = TemperatureInput::Theta(vec![1.0]);
        if let CommandConfig::Density { grid, .. } = &mut cfg.command {
            *grid = 1;
        }
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
    }

    #[test]
    fn molecular_resolution_preserves_theta() {
        let cfg = RunConfig::new(
            CommandConfig::VarianceTable,
            OscillatorInput::Molecular {
                mass_amu: 1.0,
                wavenumber_cm1: 3000.0,
                preset: None,
            },
            TemperatureInput::Kelvin(vec![300.0]),
            Format::Csv,
        );
        let r = cfg.resolve().unwrap();
        assert_eq!(r[0].oscillator.units(), UnitSystem::Reduced);
        assert!((r[0].thermal.theta() / 14.387_768_775_039_34 - 1.0).abs() < 1e-12);
        assert_eq!(r[0].input_temperature, 300.0);
    }
}
