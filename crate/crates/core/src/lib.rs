//! Position statistics of a harmonic oscillator in a heat bath.
//!
//! The exact quantum result is a Gaussian whose variance interpolates between
//! the zero-point value ħ/2mω and the classical value k_BT/mω². This crate
//! evaluates that density and its limits, cross-checks it against a brute-force
//! Boltzmann sum over eigenstates, reproduces the classical result from orbit
//! averages, and samples all three distributions.

pub mod classical;
pub mod cli;
pub mod eigensystem;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod sampling;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
pub use units::{OscillatorSpec, ThermalSpec, UnitSystem};
