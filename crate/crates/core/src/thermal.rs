//! Canonical-ensemble weights, the closed-form thermal density, its zero- and
//! high-temperature limits, and the position variance.
//!
//! With t = tanh(θ/2) the thermal density is the Gaussian
//! (α/√π)·√t·exp(−α² t x²) with variance 1/(2α² t). As θ → ∞ it tends to the
//! ground-state density; as θ → 0 it tends to the Boltzmann density of the
//! classical potential, whose variance is 1/(α²θ) = k_BT/(mω²).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{positive_finite, OscillatorSpec, ThermalSpec};

pub const DEFAULT_WEIGHT_EPSILON: f64 = 1e-12;
pub const MAX_TRUNCATION: u64 = 1_000_000;
pub const DEFAULT_GRID_POINTS: usize = 1001;
pub const DEFAULT_GRID_SIGMAS: f64 = 6.0;

/// P_n = e^{−nθ}(1 − e^{−θ}).
pub fn occupation(theta: f64, n: u64) -> Result<f64> {
    let theta = positive_finite("theta", theta)?;
    Ok(occupation_unchecked(theta, n))
}

fn occupation_unchecked(theta: f64, n: u64) -> f64 {
    (-(n as f64) * theta).exp() * -(-theta).exp_m1()
}

/// Smallest n with e^{−(n+1)θ} < ε, i.e. the last level that must be kept for
/// the geometric tail to drop below ε.
pub(crate) fn truncation_order(theta: f64, epsilon: f64, cap: u64) -> Result<u64> {
    let estimate = ((1.0 / epsilon).ln() / theta).floor().max(0.0);
    if estimate.is_nan() || estimate > cap as f64 {
        return Err(Error::TruncationCapExceeded {
            cap,
            theta,
            achievable: (-((cap + 1) as f64) * theta).exp(),
        });
    }
    let mut n = estimate as u64;
    // Floating rounding can leave the estimate one off either way.
    while n > 0 && (-(n as f64) * theta).exp() < epsilon {
        n -= 1;
    }
    while (-((n + 1) as f64) * theta).exp() >= epsilon {
        n += 1;
    }
    if n > cap {
        return Err(Error::TruncationCapExceeded {
            cap,
            theta,
            achievable: (-((cap + 1) as f64) * theta).exp(),
        });
    }
    Ok(n)
}

/// Boltzmann occupations P_0..=P_{n_max} truncated where the geometric tail
/// Σ_{n>n_max} P_n = e^{−(n_max+1)θ} first drops below ε.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationWeights {
    pub theta: f64,
    pub weights: Vec<f64>,
    pub tail_bound: f64,
}

impl OccupationWeights {
    pub fn new(theta: f64, epsilon: f64) -> Result<Self> {
        Self::with_cap(theta, epsilon, MAX_TRUNCATION)
    }

    pub fn with_cap(theta: f64, epsilon: f64, cap: u64) -> Result<Self> {
        let theta = positive_finite("theta", theta)?;
        let epsilon = positive_finite("epsilon", epsilon)?;
        let n_max = truncation_order(theta, epsilon, cap)?;
        let weights = (0..=n_max)
            .map(|n| occupation_unchecked(theta, n))
            .collect();
        Ok(Self {
            theta,
            weights,
            tail_bound: (-((n_max + 1) as f64) * theta).exp(),
        })
    }

    pub fn n_max(&self) -> u64 {
        self.weights.len() as u64 - 1
    }
}

fn half_tanh(thermal: &ThermalSpec) -> f64 {
    // tanh keeps full relative precision for tiny arguments and saturates to
    // exactly 1 for θ/2 ≳ 19, so both limits are reached without overflow.
    (0.5 * thermal.theta()).tanh()
}

/// The thermal Gaussian for one (oscillator, bath) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalDensity {
    pub alpha: f64,
    pub theta: f64,
    pub variance: f64,
}

impl ThermalDensity {
    pub fn new(spec: &OscillatorSpec, thermal: &ThermalSpec) -> Self {
        Self {
            alpha: spec.width(),
            theta: thermal.theta(),
            variance: variance(spec, thermal),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let t = (0.5 * self.theta).tanh();
        let y = self.alpha * x;
        self.alpha / PI.sqrt() * t.sqrt() * (-t * y * y).exp()
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// P_T(x) = (α/√π)·√tanh(θ/2)·exp(−α² tanh(θ/2) x²).
pub fn thermal_density(x: f64, spec: &OscillatorSpec, thermal: &ThermalSpec) -> f64 {
    let alpha = spec.width();
    let t = half_tanh(thermal);
    let y = alpha * x;
    alpha / PI.sqrt() * t.sqrt() * (-t * y * y).exp()
}

/// Zero-temperature limit (α/√π)·exp(−α²x²), the n = 0 eigenstate density.
pub fn ground_density(x: f64, spec: &OscillatorSpec) -> f64 {
    let alpha = spec.width();
    let y = alpha * x;
    alpha / PI.sqrt() * (-y * y).exp()
}

/// Boltzmann density √(βk/2π)·exp(−βkx²/2).
pub fn classical_density(x: f64, spec: &OscillatorSpec, thermal: &ThermalSpec) -> f64 {
    let bk = thermal.beta() * spec.spring_constant();
    (bk / (2.0 * PI)).sqrt() * (-0.5 * bk * x * x).exp()
}

/// ⟨x²⟩ = (ħ/2mω)·coth(θ/2).
pub fn variance(spec: &OscillatorSpec, thermal: &ThermalSpec) -> f64 {
    variance_ground(spec) / half_tanh(thermal)
}

/// ⟨x²⟩_0 = ħ/2mω = 1/(2α²).
pub fn variance_ground(spec: &OscillatorSpec) -> f64 {
    let alpha = spec.width();
    0.5 / (alpha * alpha)
}

/// ⟨x²⟩_cl = k_BT/mω² = 1/(α²θ).
pub fn variance_classical(spec: &OscillatorSpec, thermal: &ThermalSpec) -> f64 {
    let alpha = spec.width();
    1.0 / (alpha * alpha * thermal.theta())
}

/// Langevin function coth(u) − 1/u.
fn langevin(u: f64) -> f64 {
    if u < 0.1 {
        let u2 = u * u;
        u * (1.0 / 3.0
            - u2 * (1.0 / 45.0 - u2 * (2.0 / 945.0 - u2 * (1.0 / 4725.0 - u2 * 2.0 / 93555.0))))
    } else {
        1.0 / u.tanh() - 1.0 / u
    }
}

/// ⟨x²⟩ together with its two reference values and the gaps to them.
///
/// The gaps are evaluated directly rather than by subtracting rounded
/// variances: ⟨x²⟩ − ⟨x²⟩_0 = 1/(α²(e^θ − 1)) is kept as a logarithm because it
/// underflows long before θ = 10³, and ⟨x²⟩ − ⟨x²⟩_cl = L(θ/2)/(2α²) uses the
/// Langevin function L to avoid cancellation at small θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    pub total: f64,
    pub ground: f64,
    pub classical: f64,
    pub ln_excess_over_ground: f64,
    pub excess_over_classical: f64,
}

impl VarianceBreakdown {
    pub fn new(spec: &OscillatorSpec, thermal: &ThermalSpec) -> Self {
        let alpha2 = spec.width() * spec.width();
        let theta = thermal.theta();
        // ln(e^θ − 1) = θ + ln(1 − e^{−θ})
        let ln_expm1 = theta + (-(-theta).exp()).ln_1p();
        Self {
            total: variance(spec, thermal),
            ground: variance_ground(spec),
            classical: variance_classical(spec, thermal),
            ln_excess_over_ground: -alpha2.ln() - ln_expm1,
            excess_over_classical: 0.5 * langevin(0.5 * theta) / alpha2,
        }
    }

    /// ⟨x²⟩ > ⟨x²⟩_0 and ⟨x²⟩ > ⟨x²⟩_cl, decided from the gaps.
    pub fn dominates_both_limits(&self) -> bool {
        self.ln_excess_over_ground.is_finite() && self.excess_over_classical > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Thermal,
    Ground,
    Classical,
}

/// Evenly spaced symmetric grid [−half_width, +half_width].
pub fn symmetric_grid(half_width: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Precondition(format!(
            "a grid needs at least 2 points, got {points}"
        )));
    }
    let half_width = positive_finite("grid half-width", half_width)?;
    let step = 2.0 * half_width / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            // Mirror the upper half so the grid is exactly symmetric.
            let j = points - 1 - i;
            if i <= j {
                -half_width + step * i as f64
            } else {
                half_width - step * j as f64
            }
        })
        .collect())
}

/// Composite trapezoid rule over an ordered grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// A density sampled on a position grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub regime: Regime,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    /// |trapezoid integral over the grid − 1|.
    pub normalization_residual: f64,
}

impl DensityProfile {
    pub fn sample(
        regime: Regime,
        grid: &[f64],
        spec: &OscillatorSpec,
        thermal: &ThermalSpec,
    ) -> Self {
        let density: Vec<f64> = grid
            .iter()
            .map(|&x| match regime {
                Regime::Thermal => thermal_density(x, spec, thermal),
                Regime::Ground => ground_density(x, spec),
                Regime::Classical => classical_density(x, spec, thermal),
            })
            .collect();
        let normalization_residual = (trapezoid(grid, &density) - 1.0).abs();
        Self {
            regime,
            x: grid.to_vec(),
            density,
            normalization_residual,
        }
    }
}

/// The export grid: `points` nodes over ±`sigmas`·√⟨x²⟩.
pub fn default_grid(
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    sigmas: f64,
    points: usize,
) -> Result<Vec<f64>> {
    symmetric_grid(sigmas * variance(spec, thermal).sqrt(), points)
}
