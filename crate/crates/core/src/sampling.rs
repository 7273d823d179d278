//! Exact random-variate generators for the thermal, classical canonical and
//! single-orbit position distributions, plus the statistics used to check
//! sample moments against the closed forms.
//!
//! Generator: ChaCha20 seeded with `ChaCha20Rng::seed_from_u64(seed)`; the
//! stream index selects one of 2⁶⁴ independent keystreams for that seed, so a
//! batch is identified by `(seed, stream)`. Normal variates use the ziggurat
//! sampler of `rand_distr`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classical::ClassicalOrbit;
use crate::error::{Error, Result};
use crate::thermal::{variance, variance_classical};
use crate::units::{OscillatorSpec, ThermalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingRegime {
    Quantum,
    ClassicalCanonical,
    Microcanonical,
}

impl SamplingRegime {
    pub fn label(self) -> &'static str {
        match self {
            SamplingRegime::Quantum => "quantum",
            SamplingRegime::ClassicalCanonical => "classical-canonical",
            SamplingRegime::Microcanonical => "microcanonical",
        }
    }
}

/// A distribution to draw from, reduced to the one scale it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Centered Gaussian with this variance.
    Gaussian {
        regime: SamplingRegime,
        variance: f64,
    },
    /// Arcsine law on [−A, A].
    Arcsine { amplitude: f64 },
}

impl Target {
    pub fn quantum(spec: &OscillatorSpec, thermal: &ThermalSpec) -> Self {
        Target::Gaussian {
            regime: SamplingRegime::Quantum,
            variance: variance(spec, thermal),
        }
    }

    pub fn classical(spec: &OscillatorSpec, thermal: &ThermalSpec) -> Self {
        Target::Gaussian {
            regime: SamplingRegime::ClassicalCanonical,
            variance: variance_classical(spec, thermal),
        }
    }

    pub fn microcanonical(orbit: &ClassicalOrbit) -> Self {
        Target::Arcsine {
            amplitude: orbit.amplitude,
        }
    }

    pub fn regime(&self) -> SamplingRegime {
        match *self {
            Target::Gaussian { regime, .. } => regime,
            Target::Arcsine { .. } => SamplingRegime::Microcanonical,
        }
    }

    pub fn expected_variance(&self) -> f64 {
        match *self {
            Target::Gaussian { variance, .. } => variance,
            Target::Arcsine { amplitude } => 0.5 * amplitude * amplitude,
        }
    }

    /// Standard error of the sample variance for `n` draws.
    pub fn variance_standard_error(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            Target::Gaussian { variance, .. } => variance * (2.0 / n).sqrt(),
            // Var(x²) = E x⁴ − (E x²)² = 3A⁴/8 − A⁴/4 = A⁴/8
            Target::Arcsine { amplitude } => amplitude * amplitude / (8.0 * n).sqrt(),
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        match *self {
            Target::Arcsine { amplitude } => {
                Some(0.5 + (x / amplitude).clamp(-1.0, 1.0).asin() / PI)
            }
            Target::Gaussian { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub regime: SamplingRegime,
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn draw(target: &Target, n: usize, seed: u64, stream: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::Precondition(
            "sample count must be at least 1".into(),
        ));
    }
    let mut rng = stream_rng(seed, stream);
    let values = match *target {
        Target::Gaussian { variance, .. } => {
            let normal =
                Normal::new(0.0, variance.sqrt()).map_err(|_| Error::InvalidParameter {
                    name: "variance",
                    value: variance,
                })?;
            normal.sample_iter(&mut rng).take(n).collect()
        }
        Target::Arcsine { amplitude } => (0..n)
            .map(|_| amplitude * (2.0 * PI * rng.random::<f64>()).cos())
            .collect(),
    };
    Ok(SampleBatch {
        values,
        seed,
        stream,
        regime: target.regime(),
    })
}

pub fn sample_quantum_thermal(
    n: usize,
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    seed: u64,
) -> Result<SampleBatch> {
    draw(&Target::quantum(spec, thermal), n, seed, 0)
}

pub fn sample_classical_canonical(
    n: usize,
    spec: &OscillatorSpec,
    thermal: &ThermalSpec,
    seed: u64,
) -> Result<SampleBatch> {
    draw(&Target::classical(spec, thermal), n, seed, 0)
}

pub fn sample_microcanonical(n: usize, orbit: &ClassicalOrbit, seed: u64) -> Result<SampleBatch> {
    draw(&Target::microcanonical(orbit), n, seed, 0)
}

/// (mean, unbiased variance), two-pass.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0).max(1.0))
}

/// Kolmogorov–Smirnov distance between the empirical CDF and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Sample statistics against the closed forms, with acceptance bands fixed
/// before the draw: mean within 4 standard errors of zero, variance within 3,
/// and (arcsine only) KS distance below 1.95/√n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub regime: SamplingRegime,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    pub mean: f64,
    pub mean_band: f64,
    pub variance: f64,
    pub expected_variance: f64,
    pub variance_band: f64,
    pub ks_statistic: Option<f64>,
    pub ks_bound: Option<f64>,
    pub within_range: bool,
}

impl SampleSummary {
    pub fn new(batch: &SampleBatch, target: &Target) -> Self {
        let n = batch.values.len();
        let (mean, var) = mean_and_variance(&batch.values);
        let expected = target.expected_variance();
        let sd = expected.sqrt();
        let ks_statistic = target
            .cdf(0.0)
            .map(|_| ks_statistic(&batch.values, |x| target.cdf(x).unwrap()));
        let within_range = match *target {
            Target::Arcsine { amplitude } => batch.values.iter().all(|x| x.abs() <= amplitude),
            Target::Gaussian { .. } => true,
        };
        Self {
            regime: batch.regime,
            n,
            seed: batch.seed,
            stream: batch.stream,
            mean,
            mean_band: 4.0 * sd / (n as f64).sqrt(),
            variance: var,
            expected_variance: expected,
            variance_band: 3.0 * target.variance_standard_error(n),
            ks_bound: ks_statistic.map(|_| 1.95 / (n as f64).sqrt()),
            ks_statistic,
            within_range,
        }
    }

    pub fn passes(&self) -> bool {
        let ks_ok = match (self.ks_statistic, self.ks_bound) {
            (Some(d), Some(b)) => d < b,
            _ => true,
        };
        self.mean.abs() <= self.mean_band
            && (self.variance - self.expected_variance).abs() <= self.variance_band
            && ks_ok
            && self.within_range
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::microcanonical_density;
    use crate::quadrature::AdaptiveSimpson;

    const SEED: u64 = 0x5eed_2026;

    fn reduced(theta: f64) -> (OscillatorSpec, ThermalSpec) {
        let osc = OscillatorSpec::reduced();
        let th = ThermalSpec::from_theta(theta, &osc).unwrap();
        (osc, th)
    }

    #[test]
    fn quantum_sampler_moments() {
        let (osc, th) = reduced(2.0);
        let batch = sample_quantum_thermal(1_000_000, &osc, &th, SEED).unwrap();
        let (mean, var) = mean_and_variance(&batch.values);
        let sigma2 = 0.5 / 1.0f64.tanh();
        assert!(mean.abs() < 4.0 * sigma2.sqrt() / 1e3);
        assert!((var - 0.656_517_6).abs() < 3.0 * (2.0f64 / 1e6).sqrt() * sigma2);
        let s = SampleSummary::new(&batch, &Target::quantum(&osc, &th));
        assert!(s.passes(), "{s:?}");
    }

    #[test]
    fn equal_seeds_give_identical_batches() {
        let (osc, th) = reduced(0.7);
        let a = sample_quantum_thermal(1000, &osc, &th, 9).unwrap();
        let b = sample_quantum_thermal(1000, &osc, &th, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_classical_canonical(1000, &osc, &th, 9).unwrap();
        let d = sample_classical_canonical(1000, &osc, &th, 9).unwrap();
        assert_eq!(c, d);
        let o = ClassicalOrbit::from_amplitude(1.0, &osc).unwrap();
        assert_eq!(
            sample_microcanonical(100, &o, 3).unwrap(),
            sample_microcanonical(100, &o, 3).unwrap()
        );
        let other = draw(&Target::quantum(&osc, &th), 1000, 9, 1).unwrap();
        assert_ne!(a.values, other.values);
    }

    #[test]
    fn microcanonical_sampler() {
        let osc = OscillatorSpec::reduced();
        let o = ClassicalOrbit::from_amplitude(1.5, &osc).unwrap();
        let batch = sample_microcanonical(1_000_000, &o, SEED).unwrap();
        assert!(batch.values.iter().all(|x| x.abs() <= 1.5));

        // Second moment of the orbit density by quadrature (x = A sin u), leaving
        // out strips of width δ at the turning points; each strip contributes
        // (A²/π)(δ/2 + sin(2δ)/4).
        let edge: f64 = 1e-3;
        let body = AdaptiveSimpson::default()
            .integrate(
                |u| {
                    let x = o.amplitude * u.sin();
                    x * x * microcanonical_density(x, &o).unwrap() * o.amplitude * u.cos()
                },
                -PI / 2.0 + edge,
                PI / 2.0 - edge,
            )
            .unwrap();
        let second = body + 2.0 * 1.5 * 1.5 / PI * (edge / 2.0 + (2.0 * edge).sin() / 4.0);
        assert!((second - 0.5 * 1.5 * 1.5).abs() < 1e-12);

        let target = Target::microcanonical(&o);
        let (_, var) = mean_and_variance(&batch.values);
        assert!((var - second).abs() < 3.0 * target.variance_standard_error(batch.values.len()));
        let d = ks_statistic(&batch.values, |x| target.cdf(x).unwrap());
        assert!(d < 1.95 / 1e3, "{d}");
        assert!(SampleSummary::new(&batch, &target).passes());
    }

    #[test]
    fn classical_sampler_moments() {
        let (osc, th) = reduced(0.5);
        let batch = sample_classical_canonical(1_000_000, &osc, &th, SEED).unwrap();
        let target = Target::classical(&osc, &th);
        assert_eq!(target.expected_variance(), 2.0);
        assert!(SampleSummary::new(&batch, &target).passes());
    }

    #[test]
    fn classical_and_quantum_samplers_agree_when_hot() {
        let (osc, th) = reduced(1e-3);
        let n = 10_000_000;
        let expected = 2.0 * (th.theta() / 2.0).tanh() / th.theta();
        assert!((expected - 1.0).abs() < 1e-6);

        // Independent streams.
        let q = draw(&Target::quantum(&osc, &th), n, SEED, 0).unwrap();
        let c = draw(&Target::classical(&osc, &th), n, SEED, 1).unwrap();
        let ratio = mean_and_variance(&c.values).1 / mean_and_variance(&q.values).1;
        assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");

        // Same seed and stream: both are scaled copies of one normal sequence.
        let q = sample_quantum_thermal(n, &osc, &th, SEED).unwrap();
        let c = sample_classical_canonical(n, &osc, &th, SEED).unwrap();
        let ratio = mean_and_variance(&c.values).1 / mean_and_variance(&q.values).1;
        assert!((ratio - expected).abs() < 1e-12, "{ratio} {expected}");
    }

    #[test]
    fn ks_statistic_known_cases() {
        // Uniform CDF on a perfectly stratified sample: D = 1/(2n).
        let values: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        assert!((ks_statistic(&values, |x| x) - 0.05).abs() < 1e-15);
        assert!((ks_statistic(&[0.0], |x| x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_count_rejected() {
        let (osc, th) = reduced(1.0);
        assert!(sample_quantum_thermal(0, &osc, &th, 1).is_err());
    }

    #[test]
    fn summary_flags_wrong_distribution() {
        let (osc, th) = reduced(0.5);
        let batch = sample_quantum_thermal(100_000, &osc, &th, SEED).unwrap();
        // Checked against a much colder bath, the variance is far outside 3σ.
        let (osc2, cold) = reduced(5.0);
        assert!(!SampleSummary::new(&batch, &Target::quantum(&osc2, &cold)).passes());
    }
}
