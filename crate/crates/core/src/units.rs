//! Unit conventions and the conversion from molecular inputs to reduced units.
//!
//! Two systems are supported:
//!
//! * [`UnitSystem::Molecular`]: mass in amu, length in Å, time in ps, energy in
//!   amu·Å²/ps² (= 0.01 kJ/mol up to the dalton/N_A rounding) and temperature in K.
//! * [`UnitSystem::Reduced`]: ħ = k_B = 1 with the amu and the picosecond kept as
//!   mass and time units. Length is then measured in √(ħ·ps/amu) ≈ 2.52 Å and
//!   temperature in ħ/(k_B·ps) ≈ 7.64 K.
//!
//! Every closed form in this crate depends only on the width parameter α and the
//! coldness θ = βħω, both of which are unit-system invariant in the sense that
//! θ and the product αx are preserved by [`to_reduced`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 recommended values (SI).
pub mod codata {
    /// Planck constant, J·s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant h/2π, J·s.
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    /// Boltzmann constant, J/K (exact).
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    /// Atomic mass constant (dalton), kg. Relative uncertainty 3.0e-10.
    pub const DALTON: f64 = 1.660_539_066_60e-27;
    /// Speed of light in vacuum, m/s (exact).
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    /// Avogadro constant, 1/mol (exact).
    pub const AVOGADRO: f64 = 6.022_140_76e23;

    pub const ANGSTROM: f64 = 1e-10;
    pub const PICOSECOND: f64 = 1e-12;
}

/// Energy unit of the molecular system, amu·Å²/ps², in joules.
const MOLECULAR_ENERGY_J: f64 = codata::DALTON * codata::ANGSTROM * codata::ANGSTROM
    / (codata::PICOSECOND * codata::PICOSECOND);

/// ħ in amu·Å²/ps.
const HBAR_MOLECULAR: f64 = codata::HBAR / (MOLECULAR_ENERGY_J * codata::PICOSECOND);

/// k_B in (amu·Å²/ps²)/K.
const BOLTZMANN_MOLECULAR: f64 = codata::BOLTZMANN / MOLECULAR_ENERGY_J;

/// Speed of light in cm/ps.
const SPEED_OF_LIGHT_CM_PER_PS: f64 = codata::SPEED_OF_LIGHT * 100.0 * codata::PICOSECOND;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Reduced,
    Molecular,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0,
            UnitSystem::Molecular => HBAR_MOLECULAR,
        }
    }

    pub fn boltzmann(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0,
            UnitSystem::Molecular => BOLTZMANN_MOLECULAR,
        }
    }

    /// Molecular length unit (Å) expressed in this system's length unit.
    fn angstrom(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0 / HBAR_MOLECULAR.sqrt(),
            UnitSystem::Molecular => 1.0,
        }
    }

    /// One kelvin expressed in this system's temperature unit.
    fn kelvin(self) -> f64 {
        match self {
            UnitSystem::Reduced => BOLTZMANN_MOLECULAR / HBAR_MOLECULAR,
            UnitSystem::Molecular => 1.0,
        }
    }
}

pub(crate) fn positive_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

/// Angular frequency in rad/ps for a spectroscopic wavenumber in cm⁻¹.
pub fn wavenumber_to_angular_frequency(wavenumber_cm1: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_PS * wavenumber_cm1
}

/// A particle of mass m in the potential U(x) = kx²/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    mass: f64,
    spring_constant: f64,
    frequency: f64,
    width: f64,
    units: UnitSystem,
}

impl OscillatorSpec {
    pub fn from_spring_constant(
        mass: f64,
        spring_constant: f64,
        units: UnitSystem,
    ) -> Result<Self> {
        let mass = positive_finite("mass", mass)?;
        let spring_constant = positive_finite("spring constant", spring_constant)?;
        let frequency = (spring_constant / mass).sqrt();
        Ok(Self::assemble(mass, spring_constant, frequency, units))
    }

    pub fn from_frequency(mass: f64, frequency: f64, units: UnitSystem) -> Result<Self> {
        let mass = positive_finite("mass", mass)?;
        let frequency = positive_finite("frequency", frequency)?;
        let spring_constant = mass * frequency * frequency;
        Ok(Self::assemble(mass, spring_constant, frequency, units))
    }

    /// Molecular-unit oscillator from a (reduced) mass in amu and a wavenumber in cm⁻¹.
    pub fn from_wavenumber(mass_amu: f64, wavenumber_cm1: f64) -> Result<Self> {
        let wavenumber = positive_finite("wavenumber", wavenumber_cm1)?;
        Self::from_frequency(
            mass_amu,
            wavenumber_to_angular_frequency(wavenumber),
            UnitSystem::Molecular,
        )
    }

    /// Reduced-unit oscillator with m = ω = 1, hence α = 1.
    pub fn reduced() -> Self {
        Self::assemble(1.0, 1.0, 1.0, UnitSystem::Reduced)
    }

    /// Reduced-unit oscillator with ω = 1 and the mass chosen so that α takes the given value.
    pub fn reduced_with_width(width: f64) -> Result<Self> {
        let width = positive_finite("width parameter", width)?;
        Self::from_frequency(width * width, 1.0, UnitSystem::Reduced)
    }

    fn assemble(mass: f64, spring_constant: f64, frequency: f64, units: UnitSystem) -> Self {
        let width = (mass * frequency / units.hbar()).sqrt();
        Self {
            mass,
            spring_constant,
            frequency,
            width,
            units,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn spring_constant(&self) -> f64 {
        self.spring_constant
    }

    /// Angular frequency ω = √(k/m).
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Width parameter α = √(mω/ħ), an inverse length.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn units(&self) -> UnitSystem {
        self.units
    }

    /// Level spacing ħω.
    pub fn quantum(&self) -> f64 {
        self.units.hbar() * self.frequency
    }

    /// Oscillation period 2π/ω.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.frequency
    }
}

/// Heat-bath state for a particular oscillator.
///
/// The coldness θ = βħω depends on the oscillator frequency, so a `ThermalSpec`
/// is only meaningful together with the [`OscillatorSpec`] it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    temperature: f64,
    beta: f64,
    theta: f64,
    units: UnitSystem,
}

impl ThermalSpec {
    pub fn from_temperature(temperature: f64, oscillator: &OscillatorSpec) -> Result<Self> {
        let temperature = positive_finite("temperature", temperature)?;
        let units = oscillator.units();
        let beta = 1.0 / (units.boltzmann() * temperature);
        Self::assemble(temperature, beta, beta * oscillator.quantum(), units)
    }

    pub fn from_beta(beta: f64, oscillator: &OscillatorSpec) -> Result<Self> {
        let beta = positive_finite("inverse temperature", beta)?;
        let units = oscillator.units();
        let temperature = 1.0 / (units.boltzmann() * beta);
        Self::assemble(temperature, beta, beta * oscillator.quantum(), units)
    }

    pub fn from_theta(theta: f64, oscillator: &OscillatorSpec) -> Result<Self> {
        let theta = positive_finite("theta", theta)?;
        let units = oscillator.units();
        let beta = theta / oscillator.quantum();
        let temperature = 1.0 / (units.boltzmann() * beta);
        Self::assemble(temperature, beta, theta, units)
    }

    fn assemble(temperature: f64, beta: f64, theta: f64, units: UnitSystem) -> Result<Self> {
        // Extreme inputs can still overflow or underflow after division.
        Ok(Self {
            temperature: positive_finite("temperature", temperature)?,
            beta: positive_finite("inverse temperature", beta)?,
            theta: positive_finite("theta", theta)?,
            units,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Dimensionless coldness θ = βħω.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn units(&self) -> UnitSystem {
        self.units
    }
}

fn convert(
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    from: UnitSystem,
    to: UnitSystem,
) -> Result<(OscillatorSpec, ThermalSpec)> {
    for found in [spec.units(), thermal.units()] {
        if found != from {
            return Err(Error::UnitMismatch {
                expected: from,
                found,
            });
        }
    }
    // Mass and time units coincide in both systems, so m, ω and k carry over
    // unchanged; only ħ, k_B and the temperature scale differ.
    let oscillator = OscillatorSpec::from_frequency(spec.mass(), spec.frequency(), to)?;
    let temperature = thermal.temperature() / from.kelvin() * to.kelvin();
    let thermal = ThermalSpec::from_temperature(temperature, &oscillator)?;
    Ok((oscillator, thermal))
}

/// Express an oscillator and bath given in `units` in the reduced system.
///
/// θ and the dimensionless density shape αx are preserved. Reduced inputs are
/// returned unchanged.
pub fn to_reduced(
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    units: UnitSystem,
) -> Result<(OscillatorSpec, ThermalSpec)> {
    if units == UnitSystem::Reduced {
        convert(spec, thermal, units, units)?;
        return Ok((*spec, *thermal));
    }
    convert(spec, thermal, units, UnitSystem::Reduced)
}

/// Inverse of [`to_reduced`] for molecular inputs.
pub fn to_molecular(
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
) -> Result<(OscillatorSpec, ThermalSpec)> {
    convert(spec, thermal, UnitSystem::Reduced, UnitSystem::Molecular)
}

/// Convert a length between systems (Å for molecular).
pub fn convert_length(length: f64, from: UnitSystem, to: UnitSystem) -> f64 {
    length / from.angstrom() * to.angstrom()
}

/// Ratio ⟨x²⟩_cl / ⟨x²⟩_0 = 2k_BT/ħω = 2/θ.
///
/// Above one the fluctuations are thermally dominated, below one the zero-point
/// motion dominates.
pub fn quantumness_ratio(_spec: &OscillatorSpec, thermal: &ThermalSpec) -> f64 {
    2.0 / thermal.theta()
}
