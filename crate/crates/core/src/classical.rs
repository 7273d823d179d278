//! The fully classical picture: the Newtonian orbit, its time-averaged
//! (microcanonical) position density, the canonical average of that density
//! over energies, and a velocity-Verlet simulation that checks the orbit
//! density empirically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveSimpson;
use crate::units::{finite, positive_finite, OscillatorSpec, ThermalSpec};

/// Cutoff of the energy integral in units of k_BT; the omitted tail is below e^{−40}.
const ENERGY_CUTOFF_KT: f64 = 40.0;
const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// A single orbit x(t) = A cos(ωt), started at rest from the turning point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOrbit {
    pub amplitude: f64,
    pub energy: f64,
    pub period: f64,
}

impl ClassicalOrbit {
    pub fn from_amplitude(amplitude: f64, spec: &OscillatorSpec) -> Result<Self> {
        let amplitude = positive_finite("amplitude", amplitude)?;
        Ok(Self {
            amplitude,
            energy: 0.5 * spec.spring_constant() * amplitude * amplitude,
            period: spec.period(),
        })
    }

    /// A = √(2E/k).
    pub fn from_energy(energy: f64, spec: &OscillatorSpec) -> Result<Self> {
        let energy = positive_finite("energy", energy)?;
        Ok(Self {
            amplitude: (2.0 * energy / spec.spring_constant()).sqrt(),
            energy,
            period: spec.period(),
        })
    }
}

pub fn trajectory(t: f64, orbit: &ClassicalOrbit, spec: &OscillatorSpec) -> f64 {
    orbit.amplitude * (spec.frequency() * t).cos()
}

/// Fraction of time spent near x: 1/(π√(A² − x²)) on the open interval (−A, A).
pub fn microcanonical_density(x: f64, orbit: &ClassicalOrbit) -> Result<f64> {
    let a = orbit.amplitude;
    if x.is_nan() || x.abs() >= a {
        return Err(Error::OutsideOrbit { x, amplitude: a });
    }
    Ok(1.0 / (PI * ((a - x) * (a + x)).sqrt()))
}

/// Mean of the orbit density over [lo, hi] ⊂ [−A, A]:
/// (asin(hi/A) − asin(lo/A)) / (π (hi − lo)).
pub fn microcanonical_bin_average(lo: f64, hi: f64, orbit: &ClassicalOrbit) -> f64 {
    let a = orbit.amplitude;
    let u = |x: f64| (x / a).clamp(-1.0, 1.0).asin();
    (u(hi) - u(lo)) / (PI * (hi - lo))
}

/// Orbit densities averaged over a canonical distribution of energies:
///
/// ∫_{kx²/2}^∞ e^{−βE} p_cl(x; E) dE / ∫_0^∞ e^{−βE} dE.
///
/// The substitution E = kx²/2 + z² turns dE into 2z dz while A² − x² becomes
/// 2z²/k, so the inverse square root singularity at the lower limit cancels
/// against the Jacobian. The remaining integrand is smooth; it is integrated in
/// s = √β·z up to s² = 40.
pub fn canonical_classical_density(
    x: f64,
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
) -> Result<f64> {
    canonical_classical_density_with(&AdaptiveSimpson::default(), x, spec, thermal)
}

pub fn canonical_classical_density_with(
    quadrature: &AdaptiveSimpson,
    x: f64,
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
) -> Result<f64> {
    let x = finite("position", x)?;
    let beta = thermal.beta();
    let k = spec.spring_constant();
    let floor = 0.5 * k * x * x;
    // 2z·p_cl(x; E) with √(A² − x²) = z√(2/k)
    let jacobian_density = 2.0 / PI * (0.5 * k).sqrt();
    let integral = quadrature.integrate(
        |s| {
            let z = s / beta.sqrt();
            (-beta * (floor + z * z)).exp() * jacobian_density
        },
        0.0,
        ENERGY_CUTOFF_KT.sqrt(),
    )?;
    // dz = ds/√β, and ∫_0^∞ e^{−βE} dE = 1/β.
    Ok(integral / beta.sqrt() * beta)
}

/// Velocity-Verlet integrator for m ẍ = −kx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityVerlet {
    pub position: f64,
    pub velocity: f64,
    pub dt: f64,
    mass: f64,
    spring_constant: f64,
    acceleration: f64,
}

impl VelocityVerlet {
    pub fn new(position: f64, velocity: f64, dt: f64, spec: &OscillatorSpec) -> Self {
        let omega2 = spec.spring_constant() / spec.mass();
        Self {
            position,
            velocity,
            dt,
            mass: spec.mass(),
            spring_constant: spec.spring_constant(),
            acceleration: -omega2 * position,
        }
    }

    pub fn step(&mut self) {
        let half = 0.5 * self.dt;
        self.velocity += half * self.acceleration;
        self.position += self.dt * self.velocity;
        self.acceleration = -self.spring_constant / self.mass * self.position;
        self.velocity += half * self.acceleration;
    }

    /// Flip the velocity so further steps retrace the trajectory.
    pub fn reverse(&mut self) {
        self.velocity = -self.velocity;
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.mass * self.velocity * self.velocity
            + 0.5 * self.spring_constant * self.position * self.position
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total_steps: u64,
    /// Step actually used, after any resonance nudge.
    pub dt: f64,
    /// |⟨E⟩_last period − ⟨E⟩_first period| / E₀: secular drift with the
    /// O((ω dt)²) oscillation of Verlet energies averaged out.
    pub energy_drift: f64,
    /// max_t |E(t) − E₀| / E₀, the bounded oscillation included.
    pub max_energy_deviation: f64,
    /// |E(t_end) − E₀| / E₀.
    pub final_energy_deviation: f64,
}

impl TrajectoryHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// counts / (N·width): the time-averaged density estimate per bin.
    pub fn normalized_density(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&c, e)| c as f64 / (self.total_steps as f64 * (e[1] - e[0])))
            .collect()
    }

    pub fn analytic_bin_averages(&self, orbit: &ClassicalOrbit) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|e| microcanonical_bin_average(e[0], e[1], orbit))
            .collect()
    }

    /// Largest |histogram / analytic − 1| over bins, skipping `exclude` bins at each edge.
    pub fn max_interior_deviation(&self, orbit: &ClassicalOrbit, exclude: usize) -> f64 {
        let observed = self.normalized_density();
        let expected = self.analytic_bin_averages(orbit);
        let n = self.bins();
        (exclude..n.saturating_sub(exclude))
            .map(|i| (observed[i] / expected[i] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |c_i − c_{B−1−i}| / max(c_i, c_{B−1−i}).
    pub fn max_mirror_asymmetry(&self) -> f64 {
        let n = self.bins();
        (0..n / 2)
            .map(|i| {
                let (a, b) = (self.counts[i] as f64, self.counts[n - 1 - i] as f64);
                if a.max(b) == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / a.max(b)
                }
            })
            .fold(0.0, f64::max)
    }
}

fn near_resonant(ratio: f64) -> bool {
    (1..=10_000u32).any(|q| {
        let qr = q as f64 * ratio;
        (qr - qr.round()).abs() < 1e-9
    })
}

/// Move dt off any ratio dt/period = p/q with small q, so that sampling at
/// every step does not revisit a finite set of phases.
pub fn desynchronized_step(dt: f64, period: f64) -> f64 {
    let mut dt = dt;
    while near_resonant(dt / period) {
        dt *= 1.0 - 1e-4 / GOLDEN_RATIO;
    }
    dt
}

/// Integrate from (A, 0) with velocity Verlet, recording the position after
/// every step into `bins` equal bins over [−A, A].
pub fn simulate_histogram(
    orbit: &ClassicalOrbit,
    spec: &OscillatorSpec,
    dt: f64,
    steps: u64,
    bins: usize,
) -> Result<TrajectoryHistogram> {
    let dt = positive_finite("time step", dt)?;
    if dt >= orbit.period / 20.0 {
        return Err(Error::Precondition(format!(
            "time step {dt} must be below period/20 = {}",
            orbit.period / 20.0
        )));
    }
    if steps < 100_000 {
        return Err(Error::Precondition(format!(
            "need at least 1e5 steps, got {steps}"
        )));
    }
    if bins < 20 {
        return Err(Error::Precondition(format!(
            "need at least 20 bins, got {bins}"
        )));
    }

    let dt = desynchronized_step(dt, orbit.period);
    let a = orbit.amplitude;
    let width = 2.0 * a / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { a } else { -a + width * i as f64 })
        .collect();
    let mut counts = vec![0u64; bins];

    let e0 = orbit.energy;
    let window = ((orbit.period / dt).round() as u64).clamp(1, steps / 2);
    let mut first_window = 0.0;
    let mut last_window = 0.0;
    let mut max_dev: f64 = 0.0;

    let mut verlet = VelocityVerlet::new(a, 0.0, dt, spec);
    for i in 0..steps {
        verlet.step();
        // Verlet overshoots the turning points by O((ω dt)²); fold into edge bins.
        let bin = (((verlet.position + a) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[bin] += 1;
        let e = verlet.energy();
        max_dev = max_dev.max((e - e0).abs());
        if i < window {
            first_window += e;
        }
        if i >= steps - window {
            last_window += e;
        }
    }

    let w = window as f64;
    Ok(TrajectoryHistogram {
        bin_edges,
        counts,
        total_steps: steps,
        dt,
        energy_drift: (last_window / w - first_window / w).abs() / e0,
        max_energy_deviation: max_dev / e0,
        final_energy_deviation: (verlet.energy() - e0).abs() / e0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::{classical_density, symmetric_grid, variance};
    use crate::units::UnitSystem;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn orbit_round_trips() {
        let osc = OscillatorSpec::from_spring_constant(2.5, 7.0, UnitSystem::Reduced).unwrap();
        let o = ClassicalOrbit::from_amplitude(1.7, &osc).unwrap();
        let back = ClassicalOrbit::from_energy(o.energy, &osc).unwrap();
        assert!(rel(back.amplitude, 1.7) < 1e-14);
        assert!(rel(o.period * osc.frequency(), 2.0 * PI) < 1e-14);
        assert!(ClassicalOrbit::from_amplitude(0.0, &osc).is_err());
        assert!(ClassicalOrbit::from_energy(-1.0, &osc).is_err());
    }

    #[test]
    fn trajectory_landmarks() {
        let osc = OscillatorSpec::from_frequency(1.0, 3.0, UnitSystem::Reduced).unwrap();
        let o = ClassicalOrbit::from_amplitude(2.0, &osc).unwrap();
        assert_eq!(trajectory(0.0, &o, &osc), 2.0);
        assert!((trajectory(o.period / 2.0, &o, &osc) + 2.0).abs() < 1e-15);
        assert!(trajectory(o.period / 4.0, &o, &osc).abs() < 2.0 * 1e-15);
    }

    #[test]
    fn microcanonical_values() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(1.0, &osc).unwrap();
        assert!(rel(microcanonical_density(0.0, &o).unwrap(), 1.0 / PI) < 1e-15);
        assert!(rel(microcanonical_density(0.6, &o).unwrap(), 1.0 / (PI * 0.8)) < 1e-15);
        assert!((1.0 / (PI * 0.8) - 0.397_887_4).abs() < 1e-7);
        assert!(matches!(
            microcanonical_density(1.0, &o),
            Err(Error::OutsideOrbit { .. })
        ));
        assert!(microcanonical_density(-1.5, &o).is_err());
        assert!(microcanonical_density(f64::NAN, &o).is_err());
    }

    #[test]
    fn microcanonical_normalization_via_arcsine_substitution() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(1.3, &osc).unwrap();
        let q = AdaptiveSimpson::default();
        // x = A sin u, dx = A cos u du. The strips of width δ next to the turning
        // points are left out because A² − x² loses all precision there; each
        // contributes exactly δ/π.
        let edge = 1e-3;
        let body = q
            .integrate(
                |u| {
                    microcanonical_density(o.amplitude * u.sin(), &o).unwrap()
                        * o.amplitude
                        * u.cos()
                },
                -PI / 2.0 + edge,
                PI / 2.0 - edge,
            )
            .unwrap();
        // Each omitted edge strip contributes exactly edge/π.
        assert!((body + 2.0 * edge / PI - 1.0).abs() < 1e-12);
    }

    #[test]
    fn microcanonical_shape() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(1.0, &osc).unwrap();
        let mut last = 0.0;
        for i in 0..100 {
            let x = i as f64 / 100.0;
            let p = microcanonical_density(x, &o).unwrap();
            assert_eq!(p, microcanonical_density(-x, &o).unwrap());
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn canonical_average_reproduces_boltzmann() {
        let osc = OscillatorSpec::reduced();
        // βk = 2π gives a unit peak.
        let th = ThermalSpec::from_theta(2.0 * PI, &osc).unwrap();
        assert!((canonical_classical_density(0.0, &osc, &th).unwrap() - 1.0).abs() < 1e-8);

        let th = ThermalSpec::from_theta(1.0, &osc).unwrap();
        let sigma = variance(&osc, &th).sqrt();
        for x in symmetric_grid(6.0 * sigma, 101).unwrap() {
            let q = canonical_classical_density(x, &osc, &th).unwrap();
            assert!((q - classical_density(x, &osc, &th)).abs() < 1e-8, "x={x}");
        }
        let norm = AdaptiveSimpson::with_tolerance(1e-10)
            .integrate(
                |x| canonical_classical_density(x, &osc, &th).unwrap(),
                -10.0,
                10.0,
            )
            .unwrap();
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn canonical_average_in_molecular_units() {
        let osc = OscillatorSpec::from_wavenumber(12.0, 1000.0).unwrap();
        let th = ThermalSpec::from_temperature(300.0, &osc).unwrap();
        for x in [0.0, 0.02, -0.05, 0.1] {
            let q = canonical_classical_density(x, &osc, &th).unwrap();
            let c = classical_density(x, &osc, &th);
            assert!(rel(q, c) < 1e-10, "x={x}: {q} vs {c}");
        }
    }

    #[test]
    fn verlet_is_time_reversible() {
        let osc = OscillatorSpec::from_frequency(1.0, 2.0, UnitSystem::Reduced).unwrap();
        let a = 1.5;
        let mut v = VelocityVerlet::new(a, 0.0, osc.period() / 997.0, &osc);
        for _ in 0..100_000 {
            v.step();
        }
        v.reverse();
        for _ in 0..100_000 {
            v.step();
        }
        assert!((v.position - a).abs() < 1e-9 * a);
        assert!(v.velocity.abs() < 1e-9 * a * osc.frequency());
    }

    #[test]
    fn energy_after_a_million_steps() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(1.0, &osc).unwrap();
        let mut v = VelocityVerlet::new(1.0, 0.0, o.period / 1000.0, &osc);
        for _ in 0..1_000_000 {
            v.step();
        }
        assert!(rel(v.energy(), o.energy) < 1e-6);
    }

    #[test]
    fn resonant_steps_are_nudged() {
        assert!(near_resonant(1.0 / 1000.0));
        assert!(near_resonant(3.0 / 7.0));
        let dt = desynchronized_step(1e-3, 1.0);
        assert!(dt != 1e-3 && (dt - 1e-3).abs() < 1e-7);
        assert!(!near_resonant(dt));
        let odd = 1.0 / (1000.0 * GOLDEN_RATIO);
        assert_eq!(desynchronized_step(odd, 1.0), odd);
    }

    #[test]
    fn preconditions() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(1.0, &osc).unwrap();
        let p = o.period;
        assert!(simulate_histogram(&o, &osc, p / 10.0, 200_000, 50).is_err());
        assert!(simulate_histogram(&o, &osc, p / 1000.0, 10, 50).is_err());
        assert!(simulate_histogram(&o, &osc, p / 1000.0, 200_000, 5).is_err());
        assert!(simulate_histogram(&o, &osc, -1.0, 200_000, 50).is_err());
    }

    #[test]
    fn histogram_bookkeeping() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(0.8, &osc).unwrap();
        let h = simulate_histogram(&o, &osc, o.period / 500.0, 200_000, 40).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 200_000);
        assert_eq!(h.bin_edges.len(), 41);
        assert_eq!(h.bin_edges[0], -0.8);
        assert_eq!(h.bin_edges[40], 0.8);
        assert!(h.energy_drift < 1e-6);
        let expected = h.analytic_bin_averages(&o);
        let total: f64 = expected
            .iter()
            .zip(h.bin_edges.windows(2))
            .map(|(p, e)| p * (e[1] - e[0]))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
