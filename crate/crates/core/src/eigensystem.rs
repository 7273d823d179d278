//! Harmonic-oscillator eigenvalues, Hermite functions and eigenstate densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{finite, OscillatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenLevel {
    pub n: u64,
    pub energy: f64,
}

impl EigenLevel {
    pub fn new(n: u64, spec: &OscillatorSpec) -> Self {
        Self {
            n,
            energy: energy(n, spec),
        }
    }
}

/// E_n = ħω(n + ½).
pub fn energy(n: u64, spec: &OscillatorSpec) -> f64 {
    spec.quantum() * (n as f64 + 0.5)
}

/// Physicists' Hermite polynomial H_n(y) from the raw three-term recurrence.
///
/// Only usable while H_n(y) fits in an f64; past that point use
/// [`HermiteFunctions`], which carries the normalization inside the recurrence.
pub fn hermite(n: u64, y: f64) -> Result<f64> {
    let y = finite("hermite argument", y)?;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::HermiteOverflow { n, y });
        }
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::HermiteOverflow { n, y })
    }
}

const RESCALE_EXPONENT: i32 = 200;
const RESCALE_THRESHOLD: f64 = 1.606_938_044_258_990_3e60; // 2^200
const RESCALE_FACTOR: f64 = 6.223_015_277_861_142e-61; // 2^-200

/// Normalized Hermite functions φ_n(y) = H_n(y) e^{-y²/2} / √(2ⁿ n! √π),
/// advanced one order at a time.
///
/// The recurrence runs on φ_n·e^{y²/2}·2^{-s} where the Gaussian is kept aside
/// and `s` is a power-of-two exponent bumped whenever the running value grows
/// past 2²⁰⁰. Rescaling by powers of two is exact, so low orders agree with the
/// plain formula to rounding while orders in the tens of thousands and
/// arguments beyond the Gaussian underflow range stay representable.
#[derive(Debug, Clone)]
pub struct HermiteFunctions {
    y: f64,
    n: u64,
    prev: f64,
    cur: f64,
    exponent: i32,
}

impl HermiteFunctions {
    pub fn new(y: f64) -> Self {
        Self {
            y,
            n: 0,
            prev: 0.0,
            cur: PI.powf(-0.25),
            exponent: 0,
        }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn advance(&mut self) {
        let n = self.n as f64;
        let next =
            (2.0 / (n + 1.0)).sqrt() * self.y * self.cur - (n / (n + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        if self.cur.abs() > RESCALE_THRESHOLD {
            self.cur *= RESCALE_FACTOR;
            self.prev *= RESCALE_FACTOR;
            self.exponent += RESCALE_EXPONENT;
        }
    }

    /// Advance until the current order equals `n`. Orders never move backwards.
    pub fn advance_to(&mut self, n: u64) {
        while self.n < n {
            self.advance();
        }
    }

    fn log_magnitude(&self) -> f64 {
        self.cur.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2 - 0.5 * self.y * self.y
    }

    fn gaussian_is_direct(&self) -> bool {
        self.exponent == 0 && 0.5 * self.y * self.y < 700.0
    }

    /// φ_n(y) at the current order.
    pub fn value(&self) -> f64 {
        if self.cur == 0.0 {
            return 0.0;
        }
        if self.gaussian_is_direct() {
            self.cur * (-0.5 * self.y * self.y).exp()
        } else {
            self.cur.signum() * self.log_magnitude().exp()
        }
    }

    /// φ_n(y)² at the current order.
    pub fn squared(&self) -> f64 {
        if self.cur == 0.0 {
            return 0.0;
        }
        if self.gaussian_is_direct() {
            let v = self.cur * (-0.5 * self.y * self.y).exp();
            v * v
        } else {
            (2.0 * self.log_magnitude()).exp()
        }
    }
}

/// Signed normalized Hermite function φ_n(y).
pub fn hermite_function(n: u64, y: f64) -> f64 {
    let mut h = HermiteFunctions::new(y);
    h.advance_to(n);
    h.value()
}

/// Position density |Ψ_n(x)|² = α φ_n(αx)².
pub fn eigen_density(n: u64, x: f64, spec: &OscillatorSpec) -> f64 {
    let alpha = spec.width();
    let mut h = HermiteFunctions::new(alpha * x);
    h.advance_to(n);
    alpha * h.squared()
}

/// The textbook form α/(2ⁿ n! √π) H_n(αx)² exp(−α²x²) with raw H_n and an
/// explicit 2ⁿ n!. Overflows near n ≈ 150.
pub fn eigen_density_naive(n: u64, x: f64, spec: &OscillatorSpec) -> Result<f64> {
    let alpha = spec.width();
    let y = alpha * x;
    let h = hermite(n, y)?;
    let norm = (1..=n).fold(1.0_f64, |acc, k| acc * 2.0 * k as f64);
    if !norm.is_finite() {
        return Err(Error::HermiteOverflow { n, y });
    }
    Ok(alpha / (norm * PI.sqrt()) * h * h * (-y * y).exp())
}

/// Half-width (√(2n+1) + margin)/α: the classical turning point of level n plus
/// a margin measured in units of 1/α.
pub fn turning_half_width(n: u64, spec: &OscillatorSpec, margin: f64) -> f64 {
    ((2.0 * n as f64 + 1.0).sqrt() + margin) / spec.width()
}

/// Sign changes of φ_n along an evenly spaced grid; exact zeros are skipped.
pub fn count_sign_changes(n: u64, spec: &OscillatorSpec, half_width: f64, points: usize) -> usize {
    let alpha = spec.width();
    let step = 2.0 * half_width / (points - 1) as f64;
    let mut last = 0.0_f64;
    let mut changes = 0;
    for i in 0..points {
        let x = -half_width + step * i as f64;
        let v = hermite_function(n, alpha * x);
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::AdaptiveSimpson;
    use crate::units::UnitSystem;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn energies() {
        let osc = OscillatorSpec::reduced();
        assert_eq!(energy(0, &osc), 0.5);
        assert_eq!(energy(3, &osc), 3.5);
        assert_eq!(energy(1_000_000, &osc), 1_000_000.5);
        let level = EigenLevel::new(7, &osc);
        assert_eq!(level.energy, 7.5);
    }

    #[test]
    fn level_spacing_is_one_quantum() {
        let osc = OscillatorSpec::from_wavenumber(1.0, 3000.0).unwrap();
        for n in [0u64, 1, 10, 999] {
            let gap = energy(n + 1, &osc) - energy(n, &osc);
            assert!(rel(gap, osc.quantum()) < 1e-12);
            assert!(rel(energy(n, &osc), osc.quantum() * (n as f64 + 0.5)) < 1e-15);
        }
    }

    #[test]
    fn hermite_low_orders() {
        for y in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert_eq!(hermite(0, y).unwrap(), 1.0);
        }
        assert_eq!(hermite(1, 2.0).unwrap(), 4.0);
        // 16y⁴ − 48y² + 12 at y = 1.3: 16·2.8561 − 48·1.69 + 12
        let y: f64 = 1.3;
        let explicit = 16.0 * y.powi(4) - 48.0 * y * y + 12.0;
        assert!((explicit - (45.6976 - 81.12 + 12.0)).abs() < 1e-12);
        assert!(rel(hermite(4, y).unwrap(), explicit) < 1e-14);
    }

    #[test]
    fn hermite_overflow_is_reported() {
        assert!(matches!(
            hermite(400, 30.0),
            Err(Error::HermiteOverflow { n: 400, .. })
        ));
        assert!(hermite(3, f64::NAN).is_err());
    }

    #[test]
    fn density_spot_values() {
        let osc = OscillatorSpec::reduced();
        assert!(rel(eigen_density(0, 0.0, &osc), 1.0 / PI.sqrt()) < 1e-15);
        for alpha in [0.3, 1.0, 4.0] {
            let s = OscillatorSpec::reduced_with_width(alpha).unwrap();
            assert_eq!(eigen_density(1, 0.0, &s), 0.0);
        }
        // H_2(1) = 2; density = α/(4·2·√π) · 4 · e^{-1} with α = 1.
        let expected = 4.0 / (8.0 * PI.sqrt()) * (-1.0f64).exp();
        assert!(rel(eigen_density(2, 1.0, &osc), expected) < 1e-14);
        let s = OscillatorSpec::reduced_with_width(2.0).unwrap();
        assert!(rel(eigen_density(2, 0.5, &s), 2.0 * expected) < 1e-14);
    }

    #[test]
    fn normalization() {
        for n in [0u64, 5, 50] {
            let osc = OscillatorSpec::reduced_with_width(1.7).unwrap();
            let l = turning_half_width(n, &osc, 8.0);
            let q = AdaptiveSimpson::default().with_panels(16 + 4 * n as usize);
            let total = q.integrate(|x| eigen_density(n, x, &osc), -l, l).unwrap();
            assert!((total - 1.0).abs() < 1e-10, "n={n}: {total}");
        }
    }

    #[test]
    fn matches_naive_formula_at_low_order() {
        let osc = OscillatorSpec::from_frequency(2.0, 0.75, UnitSystem::Reduced).unwrap();
        // Pointwise relative error is ill-conditioned at the nodes, so the
        // deviation is measured against the level's peak density.
        for n in 0..=12u64 {
            let xs: Vec<f64> = (0..=200).map(|i| -5.0 + 0.05 * i as f64 + 1e-3).collect();
            let naive: Vec<f64> = xs
                .iter()
                .map(|&x| eigen_density_naive(n, x, &osc).unwrap())
                .collect();
            let peak = naive.iter().cloned().fold(0.0, f64::max);
            for (&x, &b) in xs.iter().zip(&naive) {
                let a = eigen_density(n, x, &osc);
                assert!((a - b).abs() / peak < 1e-12, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn node_counts() {
        let osc = OscillatorSpec::reduced_with_width(0.8).unwrap();
        for n in [0u64, 1, 2, 7, 20] {
            let l = turning_half_width(n, &osc, 2.0);
            assert_eq!(count_sign_changes(n, &osc, l, 4001), n as usize);
        }
    }

    #[test]
    fn large_orders_and_arguments_stay_finite() {
        let osc = OscillatorSpec::reduced();
        // y = 100 is inside the classically allowed region of n = 10⁴.
        let p = eigen_density(10_000, 100.0, &osc);
        assert!(p.is_finite() && p > 0.0);
        // Semiclassical envelope: the density cannot exceed a few times the
        // arcsine value 1/(π√(2n+1−y²)).
        let arcsine = 1.0 / (PI * (20_001.0f64 - 10_000.0).sqrt());
        assert!(p < 10.0 * arcsine);
        let deep = eigen_density(10_000, 300.0, &osc);
        assert_eq!(deep, 0.0);
        assert!(eigen_density(200, 3.0, &osc).is_finite());
        assert!(eigen_density_naive(200, 3.0, &osc).is_err());
    }

    #[test]
    fn parity_is_exact() {
        let osc = OscillatorSpec::reduced_with_width(1.3).unwrap();
        for n in [0u64, 1, 2, 15, 64, 301] {
            for x in [0.1, 0.77, 2.5, 9.0, 31.0] {
                assert_eq!(eigen_density(n, x, &osc), eigen_density(n, -x, &osc));
            }
        }
    }
}
