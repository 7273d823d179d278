//! Adaptive Simpson quadrature used for every density integral in the crate.

use crate::error::{Error, Result};

/// Adaptive Simpson rule with Richardson correction.
///
/// The interval is first cut into `initial_panels` equal panels so that
/// oscillatory integrands (high eigenstates) are not mistaken for smooth ones by
/// the first coarse estimate. Each panel receives a share of `abs_tol`
/// proportional to its width, and the share halves on every bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveSimpson {
    pub abs_tol: f64,
    pub max_depth: u32,
    pub initial_panels: usize,
}

impl Default for AdaptiveSimpson {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_depth: 50,
            initial_panels: 16,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

/// Neumaier compensated sum.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

impl AdaptiveSimpson {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_panels(mut self, initial_panels: usize) -> Self {
        self.initial_panels = initial_panels.max(1);
        self
    }

    /// ∫_a^b f(x) dx.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if a == b {
            return Ok(0.0);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite {
                name: "integration bound",
                value: if a.is_finite() { b } else { a },
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let panels = self.initial_panels.max(1);
        let width = (hi - lo) / panels as f64;

        let mut stack = Vec::with_capacity(2 * self.max_depth as usize + panels);
        let mut f_left = f(lo);
        for i in 0..panels {
            let pa = lo + width * i as f64;
            let pb = if i + 1 == panels {
                hi
            } else {
                lo + width * (i + 1) as f64
            };
            let fm = f(0.5 * (pa + pb));
            let fb = f(pb);
            stack.push(Panel {
                a: pa,
                b: pb,
                fa: f_left,
                fm,
                fb,
                whole: simpson(pa, pb, f_left, fm, fb),
                tol: self.abs_tol / panels as f64,
                depth: 0,
            });
            f_left = fb;
        }
        // Process left to right so the summation order is deterministic.
        stack.reverse();

        let mut total = Accumulator::default();
        let mut converged = true;
        while let Some(p) = stack.pop() {
            let m = 0.5 * (p.a + p.b);
            let lm = 0.5 * (p.a + m);
            let rm = 0.5 * (m + p.b);
            let flm = f(lm);
            let frm = f(rm);
            let left = simpson(p.a, m, p.fa, flm, p.fm);
            let right = simpson(m, p.b, p.fm, frm, p.fb);
            let refined = left + right;
            let diff = refined - p.whole;

            let resolved = diff.abs() <= 15.0 * p.tol
                || diff.abs() <= 8.0 * f64::EPSILON * refined.abs()
                || lm <= p.a
                || rm >= p.b;
            if resolved || p.depth >= self.max_depth {
                if !resolved {
                    converged = false;
                }
                total.add(refined + diff / 15.0);
                continue;
            }
            let tol = 0.5 * p.tol;
            let depth = p.depth + 1;
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol,
                depth,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol,
                depth,
            });
        }

        let estimate = sign * total.total();
        if converged && estimate.is_finite() {
            Ok(estimate)
        } else {
            Err(Error::QuadratureNotConverged {
                estimate,
                max_depth: self.max_depth,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let q = AdaptiveSimpson::default();
        let v = q
            .integrate(|x| 3.0 * x * x * x - x + 2.0, -1.0, 2.0)
            .unwrap();
        // 3/4 (16 - 1) - 1/2 (4 - 1) + 2·3
        assert!((v - (11.25 - 1.5 + 6.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_normalization() {
        let q = AdaptiveSimpson::default();
        let v = q
            .integrate(|x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt(), -12.0, 12.0)
            .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let q = AdaptiveSimpson::default();
        let v = q.integrate(f64::sin, PI, 0.0).unwrap();
        assert!((v + 2.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let q = AdaptiveSimpson::default().with_panels(64);
        let v = q.integrate(|x| (40.0 * x).cos().powi(2), 0.0, PI).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn depth_limit_reports_best_estimate() {
        let q = AdaptiveSimpson {
            abs_tol: 1e-14,
            max_depth: 3,
            initial_panels: 1,
        };
        match q.integrate(|x| x.sqrt(), 0.0, 1.0) {
            Err(Error::QuadratureNotConverged {
                estimate,
                max_depth,
            }) => {
                assert_eq!(max_depth, 3);
                assert!((estimate - 2.0 / 3.0).abs() < 1e-2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_bounds_rejected() {
        let q = AdaptiveSimpson::default();
        assert!(q.integrate(|x| x, 0.0, f64::INFINITY).is_err());
    }
}
