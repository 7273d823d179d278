//! The subcommands. Each builds its tables in memory; writing happens in
//! [`super::execute`].

use rayon::prelude::*;

use super::config::{CommandConfig, Resolved, RunConfig, TemperatureInput};
use super::output::{Cell, Check, Table};
use super::CliError;
use crate::classical::{simulate_histogram, ClassicalOrbit};
use crate::oracle::thermal_density_by_sum;
use crate::sampling::{draw, SampleSummary, SamplingRegime, Target};
use crate::thermal::{
    classical_density, default_grid, ground_density, thermal_density, trapezoid, variance,
    VarianceBreakdown,
};
use crate::units::{self, quantumness_ratio, OscillatorSpec, ThermalSpec, UnitSystem};

/// Tables produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.tables.iter().all(Table::passed)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.tables.iter().flat_map(|t| t.checks.iter())
    }
}

fn mismatch(expected: &str) -> CliError {
    CliError::Usage(format!("configuration is not a `{expected}` run"))
}

fn unit_metadata(table: &mut Table, cfg: &RunConfig) {
    table.meta("input_units", cfg_units_label(cfg));
    table.meta("length_unit", "reduced");
    if cfg.units() == UnitSystem::Molecular {
        table.meta(
            "length_unit_angstrom",
            units::convert_length(1.0, UnitSystem::Reduced, UnitSystem::Molecular),
        );
    }
}

fn cfg_units_label(cfg: &RunConfig) -> &'static str {
    match cfg.units() {
        UnitSystem::Reduced => "reduced",
        UnitSystem::Molecular => "molecular",
    }
}

fn point_metadata(table: &mut Table, r: &Resolved) {
    table.meta("temperature", r.input_temperature);
    table.meta("theta", r.thermal.theta());
    table.meta("alpha", r.oscillator.width());
    table.meta("sigma", variance(&r.oscillator, &r.thermal).sqrt());
}

pub fn cmd_density(cfg: &RunConfig) -> Result<Report, CliError> {
    let CommandConfig::Density {
        grid,
        sigmas,
        oracle,
        tol,
        normalization_tol,
    } = cfg.command
    else {
        return Err(mismatch("density"));
    };
    let points = cfg.resolve()?;
    let tables = points
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let (osc, th) = (&r.oscillator, &r.thermal);
            let xs = default_grid(osc, th, sigmas, grid)?;
            let mut columns = vec!["x", "P_T", "P_ground", "P_classical"];
            if oracle {
                columns.extend(["P_oracle_sum", "oracle_tail_bound"]);
            }
            let mut table = Table::new(format!("density_{i:03}"), &columns);
            unit_metadata(&mut table, cfg);
            point_metadata(&mut table, r);
            table.meta("grid_points", grid);

            let mut p_t = Vec::with_capacity(xs.len());
            let mut worst: f64 = 0.0;
            for &x in &xs {
                let p = thermal_density(x, osc, th);
                p_t.push(p);
                let mut row: Vec<Cell> = vec![
                    x.into(),
                    p.into(),
                    ground_density(x, osc).into(),
                    classical_density(x, osc, th).into(),
                ];
                if oracle {
                    let sum = thermal_density_by_sum(x, osc, th, (0.01 * tol).min(1e-3))?;
                    worst = worst.max((sum.value - p).abs());
                    row.push(sum.value.into());
                    row.push(sum.tail_bound.into());
                }
                table.push(row);
            }
            table.checks.push(Check::at_most(
                "normalization_residual",
                (trapezoid(&xs, &p_t) - 1.0).abs(),
                normalization_tol,
            ));
            if oracle {
                table
                    .checks
                    .push(Check::below("oracle_max_deviation", worst, tol));
            }
            Ok(table)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Report { tables })
}

pub fn cmd_variance_table(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.command != CommandConfig::VarianceTable {
        return Err(mismatch("variance-table"));
    }
    let points = cfg.resolve()?;
    let mut table = Table::new(
        "variance_table",
        &[
            "T",
            "theta",
            "x2",
            "x2_ground",
            "x2_classical",
            "ratio",
            "regime",
        ],
    );
    unit_metadata(&mut table, cfg);
    let rows: Vec<(Vec<Cell>, bool, f64)> = points
        .par_iter()
        .map(|r| {
            let (osc, th) = (&r.oscillator, &r.thermal);
            let b = VarianceBreakdown::new(osc, th);
            let ratio = quantumness_ratio(osc, th);
            let regime = if ratio < 1.0 {
                "quantum-dominated"
            } else {
                "thermal-dominated"
            };
            let ordered = b.dominates_both_limits() && b.total >= b.ground.max(b.classical);
            let ratio_error = (ratio * th.theta() / 2.0 - 1.0).abs();
            let row = vec![
                r.input_temperature.into(),
                th.theta().into(),
                b.total.into(),
                b.ground.into(),
                b.classical.into(),
                ratio.into(),
                regime.into(),
            ];
            (row, ordered, ratio_error)
        })
        .collect();
    let violations = rows.iter().filter(|(_, ok, _)| !ok).count();
    let ratio_error = rows.iter().map(|(_, _, e)| *e).fold(0.0, f64::max);
    for (row, _, _) in rows {
        table.push(row);
    }
    table.checks.push(Check::at_most(
        "inequality_violations",
        violations as f64,
        0.0,
    ));
    table
        .checks
        .push(Check::below("ratio_relative_error", ratio_error, 1e-12));
    Ok(Report {
        tables: vec![table],
    })
}

pub fn cmd_classical_sim(cfg: &RunConfig) -> Result<Report, CliError> {
    let CommandConfig::ClassicalSim {
        amplitude,
        steps,
        bins,
        steps_per_period,
        exclude_bins,
        max_deviation,
        max_drift,
    } = cfg.command
    else {
        return Err(mismatch("classical-sim"));
    };
    let osc = first_oscillator(cfg)?;
    let orbit = ClassicalOrbit::from_amplitude(amplitude, &osc)?;
    let hist = simulate_histogram(&orbit, &osc, orbit.period / steps_per_period, steps, bins)?;

    let mut table = Table::new(
        "classical_sim",
        &[
            "bin_lo",
            "bin_hi",
            "count",
            "histogram_density",
            "analytic_density",
            "relative_deviation",
            "interior",
        ],
    );
    unit_metadata(&mut table, cfg);
    table.meta("amplitude", amplitude);
    table.meta("period", orbit.period);
    table.meta("dt", hist.dt);
    table.meta("steps", steps);
    table.meta("max_energy_deviation", hist.max_energy_deviation);
    table.meta("final_energy_deviation", hist.final_energy_deviation);
    let observed = hist.normalized_density();
    let expected = hist.analytic_bin_averages(&orbit);
    for i in 0..hist.bins() {
        let interior = i >= exclude_bins && i + exclude_bins < hist.bins();
        table.push(vec![
            hist.bin_edges[i].into(),
            hist.bin_edges[i + 1].into(),
            hist.counts[i].into(),
            observed[i].into(),
            expected[i].into(),
            (observed[i] / expected[i] - 1.0).into(),
            interior.into(),
        ]);
    }
    table.checks.push(Check::below(
        "max_interior_deviation",
        hist.max_interior_deviation(&orbit, exclude_bins),
        max_deviation,
    ));
    table
        .checks
        .push(Check::below("energy_drift", hist.energy_drift, max_drift));
    Ok(Report {
        tables: vec![table],
    })
}

fn first_oscillator(cfg: &RunConfig) -> Result<OscillatorSpec, CliError> {
    cfg.resolve()?
        .first()
        .map(|r| r.oscillator)
        .ok_or_else(|| CliError::Usage("temperature list is empty".into()))
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<Report, CliError> {
    let CommandConfig::Sample {
        ref regimes,
        count,
        seed,
        amplitude,
        raw,
    } = cfg.command
    else {
        return Err(mismatch("sample"));
    };
    let points = cfg.resolve()?;
    let mut jobs: Vec<(Target, Option<&Resolved>)> = Vec::new();
    for regime in regimes {
        match regime {
            SamplingRegime::Quantum => jobs.extend(
                points
                    .iter()
                    .map(|r| (Target::quantum(&r.oscillator, &r.thermal), Some(r))),
            ),
            SamplingRegime::ClassicalCanonical => jobs.extend(
                points
                    .iter()
                    .map(|r| (Target::classical(&r.oscillator, &r.thermal), Some(r))),
            ),
            SamplingRegime::Microcanonical => {
                let osc = points[0].oscillator;
                jobs.push((
                    Target::microcanonical(&ClassicalOrbit::from_amplitude(amplitude, &osc)?),
                    None,
                ));
            }
        }
    }
    // Job index doubles as the stream index, so every row has its own stream.
    let results = jobs
        .par_iter()
        .enumerate()
        .map(|(stream, (target, _))| {
            let batch = draw(target, count, seed, stream as u64)?;
            let summary = SampleSummary::new(&batch, target);
            Ok((batch, summary))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut summary_table = Table::new(
        "sample_summary",
        &[
            "regime",
            "theta",
            "n",
            "seed",
            "stream",
            "mean",
            "mean_band",
            "variance",
            "expected_variance",
            "variance_band",
            "ks_statistic",
            "ks_bound",
            "pass",
        ],
    );
    unit_metadata(&mut summary_table, cfg);
    let mut tables = Vec::new();
    for ((batch, s), (_, point)) in results.iter().zip(&jobs) {
        let theta = point
            .map(|r| Cell::Num(r.thermal.theta()))
            .unwrap_or(Cell::Text(String::new()));
        let opt = |v: Option<f64>| v.map(Cell::Num).unwrap_or(Cell::Text(String::new()));
        summary_table.push(vec![
            s.regime.label().into(),
            theta,
            s.n.into(),
            s.seed.into(),
            s.stream.into(),
            s.mean.into(),
            s.mean_band.into(),
            s.variance.into(),
            s.expected_variance.into(),
            s.variance_band.into(),
            opt(s.ks_statistic),
            opt(s.ks_bound),
            s.passes().into(),
        ]);
        let label = format!("{}[stream {}]", s.regime.label(), s.stream);
        summary_table.checks.push(Check::at_most(
            format!("{label} |variance - expected| / band"),
            (s.variance - s.expected_variance).abs() / s.variance_band,
            1.0,
        ));
        summary_table.checks.push(Check::at_most(
            format!("{label} |mean| / band"),
            s.mean.abs() / s.mean_band,
            1.0,
        ));
        if let (Some(d), Some(b)) = (s.ks_statistic, s.ks_bound) {
            summary_table
                .checks
                .push(Check::below(format!("{label} ks_statistic"), d, b));
            summary_table.checks.push(Check::at_most(
                format!("{label} samples outside [-A, A]"),
                if s.within_range { 0.0 } else { 1.0 },
                0.0,
            ));
        }
        if raw {
            let mut t = Table::new(format!("sample_raw_{:03}", batch.stream), &["x"]);
            t.meta("regime", s.regime.label());
            t.meta("seed", batch.seed);
            t.meta("stream", batch.stream);
            for &v in &batch.values {
                t.push(vec![v.into()]);
            }
            tables.push(t);
        }
    }
    tables.insert(0, summary_table);
    Ok(Report { tables })
}

pub fn cmd_oracle_check(cfg: &RunConfig) -> Result<Report, CliError> {
    let CommandConfig::OracleCheck {
        ref alphas,
        grid,
        sigmas,
        tol,
    } = cfg.command
    else {
        return Err(mismatch("oracle-check"));
    };
    let TemperatureInput::Theta(thetas) = &cfg.temperatures else {
        return Err(CliError::Usage("oracle-check takes --theta values".into()));
    };
    let pairs: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| alphas.iter().map(move |&a| (t, a)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(theta, alpha)| {
            let osc = OscillatorSpec::reduced_with_width(alpha)?;
            let th = ThermalSpec::from_theta(theta, &osc)?;
            let xs = default_grid(&osc, &th, sigmas, grid)?;
            let mut worst: f64 = 0.0;
            let mut n_used = 0;
            let mut tail: f64 = 0.0;
            for &x in &xs {
                let sum = thermal_density_by_sum(x, &osc, &th, (0.01 * tol).min(1e-3))?;
                worst = worst.max((sum.value - thermal_density(x, &osc, &th)).abs());
                n_used = n_used.max(sum.n_used);
                tail = tail.max(sum.tail_bound);
            }
            Ok((theta, alpha, worst, n_used, tail))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new(
        "oracle_check",
        &[
            "theta",
            "alpha",
            "grid_points",
            "max_abs_deviation",
            "n_used",
            "tail_bound",
            "pass",
        ],
    );
    table.meta("length_unit", "reduced");
    let mut overall: f64 = 0.0;
    for (theta, alpha, worst, n_used, tail) in rows {
        overall = overall.max(worst);
        table.push(vec![
            theta.into(),
            alpha.into(),
            grid.into(),
            worst.into(),
            n_used.into(),
            tail.into(),
            (worst < tol).into(),
        ]);
    }
    table
        .checks
        .push(Check::below("oracle_max_deviation", overall, tol));
    Ok(Report {
        tables: vec![table],
    })
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match cfg.command {
        CommandConfig::Density { .. } => cmd_density(cfg),
        CommandConfig::VarianceTable => cmd_variance_table(cfg),
        CommandConfig::ClassicalSim { .. } => cmd_classical_sim(cfg),
        CommandConfig::Sample { .. } => cmd_sample(cfg),
        CommandConfig::OracleCheck { .. } => cmd_oracle_check(cfg),
    }
}
