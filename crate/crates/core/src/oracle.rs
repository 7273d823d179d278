//! Brute-force evaluators that the closed forms are checked against: the
//! Boltzmann-weighted sum over eigenstate densities, and quadrature moments.

use serde::{Deserialize, Serialize};

use crate::eigensystem::HermiteFunctions;
use crate::error::{Error, Result};
use crate::quadrature::AdaptiveSimpson;
use crate::thermal::{self, MAX_TRUNCATION};
use crate::units::{finite, positive_finite, OscillatorSpec, ThermalSpec};

pub const MAX_SUM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSumResult {
    pub value: f64,
    /// Highest quantum number included.
    pub n_used: u64,
    /// Upper bound on the omitted part of the sum, in density units.
    pub tail_bound: f64,
}

/// Σ_{n=0}^{n_max} P_n·|Ψ_n(x)|², truncated once the remainder is provably
/// below `tol`.
///
/// Every normalized Hermite function satisfies φ_n(y)² < 1, so each omitted
/// eigenstate density is below α and the remainder is bounded by
/// α·Σ_{n>n_max} P_n = α·e^{−(n_max+1)θ}. All orders come from a single forward
/// recurrence at the given x.
pub fn thermal_density_by_sum(
    x: f64,
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    tol: f64,
) -> Result<TruncatedSumResult> {
    thermal_density_by_sum_capped(x, spec, thermal, tol, MAX_TRUNCATION)
}

pub fn thermal_density_by_sum_capped(
    x: f64,
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    tol: f64,
    cap: u64,
) -> Result<TruncatedSumResult> {
    let x = finite("position", x)?;
    let tol = positive_finite("tolerance", tol)?;
    if tol > MAX_SUM_TOLERANCE {
        return Err(Error::Precondition(format!(
            "sum tolerance {tol:e} exceeds {MAX_SUM_TOLERANCE:e}"
        )));
    }
    let alpha = spec.width();
    let theta = thermal.theta();
    let n_max = thermal::truncation_order(theta, tol / alpha, cap).map_err(|e| match e {
        Error::TruncationCapExceeded {
            cap,
            theta,
            achievable,
        } => Error::TruncationCapExceeded {
            cap,
            theta,
            achievable: alpha * achievable,
        },
        other => other,
    })?;

    let mut hermite = HermiteFunctions::new(alpha * x);
    let ground_weight = -(-theta).exp_m1();
    let mut sum = 0.0;
    for n in 0..=n_max {
        hermite.advance_to(n);
        let weight = (-(n as f64) * theta).exp() * ground_weight;
        sum += weight * hermite.squared();
    }
    Ok(TruncatedSumResult {
        value: alpha * sum,
        n_used: n_max,
        tail_bound: alpha * (-((n_max + 1) as f64) * theta).exp(),
    })
}

/// ∫_{−L}^{L} xᵏ p(x) dx for k ∈ {0, 1, 2, 4} with the default quadrature.
pub fn moment_by_quadrature<F>(density: F, order: u32, half_width: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    moment_with(&AdaptiveSimpson::default(), density, order, half_width)
}

pub fn moment_with<F>(
    quadrature: &AdaptiveSimpson,
    density: F,
    order: u32,
    half_width: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !matches!(order, 0 | 1 | 2 | 4) {
        return Err(Error::UnsupportedMomentOrder(order));
    }
    let half_width = positive_finite("half-width", half_width)?;
    quadrature.integrate(
        |x| x.powi(order as i32) * density(x),
        -half_width,
        half_width,
    )
}
