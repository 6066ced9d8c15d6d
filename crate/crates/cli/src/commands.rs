use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tsrm_core::airy::{airy_pair, NormalizedAiry};
use tsrm_core::marginals::{
    moment_h, nu2, w_tilde, MarginalKind, Marginals, TailConstants, TailReport, HEIGHT_TAIL_RANGE,
    POSITION_TAIL_RANGE,
};
use tsrm_core::pde::{pde_marginals, phi_eigen, solve_phi};
use tsrm_core::spectrum::spectrum;
use tsrm_core::stochastic::{
    calibrate_and_test, mean_and_se, sample_ensemble, target_weights, tsaw_ensemble, CdfTable, GofReport, McEstimate,
    McTarget, SamplingMode,
};
use tsrm_core::table::DensityTable;
use tsrm_core::transforms::KearneyKernel;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_float, sibling, write_csv, write_json};

type Res<T> = Result<T, CliError>;

fn out(cfg: &RunConfig) -> Option<&Path> {
    cfg.output.as_deref()
}

pub struct DensityArgs {
    pub kind: MarginalKind,
    pub min: Option<f64>,
    pub max: f64,
    pub points: usize,
    pub time: f64,
}

pub fn density(cfg: &RunConfig, a: &DensityArgs) -> Res<()> {
    let lo = match (a.kind.is_position(), a.min) {
        (true, None) => -a.max,
        (true, Some(m)) if m == -a.max => m,
        (true, Some(_)) => return Err(CliError::Usage("position ranges are symmetric: give --max only".into())),
        (false, None) => 0.0,
        (false, Some(m)) if m >= 0.0 => m,
        (false, Some(m)) => return Err(CliError::Usage(format!("height range must start at ≥ 0, got {m}"))),
    };
    if !(a.max > lo && a.max.is_finite()) || a.points < 2 {
        return Err(CliError::Usage(format!("bad range [{lo}, {}] with {} points", a.max, a.points)));
    }
    let m = Marginals::new(cfg.k_max)?;
    let t = DensityTable::tabulate(&m, a.kind, a.time, lo, a.max, a.points)?;
    match cfg.format {
        Format::Csv => write_csv(
            out(cfg),
            cfg,
            &format!("density {}", a.kind),
            &["argument", "density"],
            t.arguments.iter().zip(&t.values).map(|(x, v)| vec![fmt_float(*x), fmt_float(*v)]),
        ),
        Format::Json => write_json(out(cfg), cfg, "density", &t),
    }
}

#[derive(Serialize)]
struct MomentRow {
    n: u32,
    /// E[H(1)ⁿ]
    height: f64,
    /// E|X(1)|ⁿ and the certified bound on its spectral remainder.
    position: f64,
    position_tail_bound: f64,
    height_exp: f64,
    position_exp: f64,
}

pub fn moments(cfg: &RunConfig, n_max: u32) -> Res<()> {
    let m = Marginals::new(cfg.k_max)?;
    let rows = (0..=n_max)
        .map(|n| {
            let x = m.moment_abs_x(n)?;
            Ok(MomentRow {
                n,
                height: moment_h(n)?,
                position: x.value,
                position_tail_bound: x.tail_bound,
                height_exp: m.quadrature_moment(MarginalKind::HeightExpTime, n)?,
                position_exp: m.moment_abs_x_hat(n)?,
            })
        })
        .collect::<Result<Vec<_>, tsrm_core::Error>>()?;
    write_json(out(cfg), cfg, "moments", &rows)
}

#[derive(Serialize)]
struct TailsReport {
    height: f64,
    position: f64,
    position_stationary: f64,
    fits: [TailReport; 2],
}

pub fn tails(cfg: &RunConfig) -> Res<()> {
    let m = Marginals::new(cfg.k_max)?;
    let TailConstants {
        height,
        position,
        position_stationary,
    } = m.tail_constants();
    let report = TailsReport {
        height,
        position,
        position_stationary,
        fits: [
            m.tail_report(MarginalKind::HeightFixedTime, HEIGHT_TAIL_RANGE)?,
            m.tail_report(MarginalKind::PositionFixedTime, POSITION_TAIL_RANGE)?,
        ],
    };
    write_json(out(cfg), cfg, "tails", &report)
}

pub fn spectrum_table(cfg: &RunConfig) -> Res<()> {
    let s = spectrum(cfg.k_max)?;
    match cfg.format {
        Format::Csv => write_csv(
            out(cfg),
            cfg,
            "spectrum",
            &["k", "delta_prime", "p"],
            s.delta_prime
                .iter()
                .zip(&s.p)
                .enumerate()
                .map(|(k, (d, p))| vec![(k + 1).to_string(), fmt_float(*d), fmt_float(*p)]),
        ),
        Format::Json => write_json(out(cfg), cfg, "spectrum", &s),
    }
}

#[derive(Serialize)]
struct WalkReport {
    mode: SamplingMode,
    position: GofReport,
    height: GofReport,
}

/// Lattice walks: rescaled samples and histograms as CSV next to `output`,
/// goodness-of-fit report as JSON (to `output.report.json`, else stdout).
pub fn simulate_tsaw(cfg: &RunConfig) -> Res<()> {
    let ecfg = cfg.ensemble_config();
    let walks = tsaw_ensemble(&ecfg)?;
    let (kx, kh) = match ecfg.mode {
        SamplingMode::FixedTime => (MarginalKind::PositionFixedTime, MarginalKind::HeightFixedTime),
        SamplingMode::GeometricTime => (MarginalKind::PositionExpTime, MarginalKind::HeightExpTime),
    };
    let m = Marginals::new(cfg.k_max)?;
    let n = ecfg.n_steps as f64;
    let raw_x: Vec<f64> = walks.iter().map(|w| w.position as f64).collect();
    let raw_h: Vec<f64> = walks.iter().map(|w| w.local_time).collect();
    let cap = |k: MarginalKind| if k.is_position() { 40.0 } else { 12.0 };
    let (rx, sx) = calibrate_and_test(&raw_x, n, kx, &m, &CdfTable::new(&m, kx, cap(kx), 4001)?)?;
    let (rh, sh) = calibrate_and_test(&raw_h, n, kh, &m, &CdfTable::new(&m, kh, cap(kh), 2001)?)?;
    if let Some(base) = out(cfg) {
        for (name, report, samples) in [("position", &rx, &sx), ("height", &rh, &sh)] {
            write_csv(
                Some(&sibling(base, &format!(".{name}.samples.csv"))),
                cfg,
                &format!("simulate tsaw {name} samples"),
                &["value"],
                samples.iter().map(|v| vec![fmt_float(*v)]),
            )?;
            let h = &report.histogram;
            write_csv(
                Some(&sibling(base, &format!(".{name}.histogram.csv"))),
                cfg,
                &format!("simulate tsaw {name} histogram"),
                &["bin_left", "bin_right", "count"],
                h.edges
                    .windows(2)
                    .zip(&h.counts)
                    .map(|(e, c)| vec![fmt_float(e[0]), fmt_float(e[1]), c.to_string()]),
            )?;
        }
    }
    let report = WalkReport {
        mode: ecfg.mode,
        position: rx,
        height: rh,
    };
    let report_path = out(cfg).map(|b| sibling(b, ".report.json"));
    write_json(report_path.as_deref(), cfg, "simulate tsaw", &report)
}

#[derive(Serialize)]
struct CheckedEstimate {
    #[serde(flatten)]
    estimate: McEstimate,
    reference: f64,
    z: f64,
}

pub fn simulate_brownian(cfg: &RunConfig, hs: &[f64], xs: &[f64]) -> Res<()> {
    if hs.iter().any(|&h| !(h >= 0.0)) || xs.iter().any(|&x| !(x > 0.0)) {
        return Err(CliError::Usage("need h ≥ 0 and x > 0".into()));
    }
    let mut grid = xs.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mcfg = cfg.mc_config();
    let modes = spectrum(400)?;
    let mut rows = Vec::new();
    let mut push = |estimate: f64, std_error: f64, target: McTarget, reference: f64| {
        rows.push(CheckedEstimate {
            estimate: McEstimate {
                target,
                estimate,
                std_error,
                n_paths: mcfg.n_paths,
            },
            reference,
            z: (estimate - reference) / std_error,
        })
    };
    for &h in hs {
        let ens = sample_ensemble(h, &grid, &mcfg)?;
        let u = NormalizedAiry::u(h)?;
        if h > 0.0 {
            let t = McTarget::U { h };
            let (e, se) = mean_and_se(&target_weights(&ens, t, None)?)?;
            push(e, se, t, u);
        }
        for (k, &x) in grid.iter().enumerate() {
            let phi = phi_eigen(&modes, x, h)?;
            let t = if h == 0.0 { McTarget::W { x } } else { McTarget::Phi { x, h } };
            let (e, se) = mean_and_se(&target_weights(&ens, t, Some(k))?)?;
            push(e, se, t, phi);
            if h > 0.0 {
                let t = McTarget::NuHat { x, h };
                let (e, se) = mean_and_se(&target_weights(&ens, t, Some(k))?)?;
                push(e, se, t, u * phi);
            }
        }
    }
    write_json(out(cfg), cfg, "simulate brownian", &rows)
}

#[derive(Serialize)]
struct PdeReport {
    max_height_deviation: f64,
    max_position_deviation: f64,
    max_deviation: f64,
    total_mass: f64,
    /// |φ̃(λ, 0) from the field − w̃(λ)| at λ = 1.
    laplace_deviation: f64,
    tolerance: f64,
    pass: bool,
}

/// Solves for φ; writes the field (CSV matrix) to `output` and the
/// marginal-consistency report to `output.report.json` (else stdout).
pub fn pde(cfg: &RunConfig) -> Res<()> {
    let field = solve_phi(cfg.pde_grid())?;
    let m = Marginals::new(cfg.k_max)?;
    let d1 = m.spectral().delta_prime[0];
    let pm = pde_marginals(&field, d1)?;
    let mut dh: f64 = 0.0;
    for (j, &h) in field.h_grid.iter().enumerate() {
        dh = dh.max((pm.height[j] - tsrm_core::marginals::nu2_hat(h)?).abs());
    }
    let mut dx: f64 = 0.0;
    for (i, &x) in field.x_grid.iter().enumerate() {
        dx = dx.max((pm.position[i] - m.nu1_hat(x)?).abs());
    }
    let tolerance = 1e-3;
    let report = PdeReport {
        max_height_deviation: dh,
        max_position_deviation: dx,
        max_deviation: dh.max(dx),
        total_mass: pm.total_mass,
        laplace_deviation: (field.laplace_at(0, 1.0, d1) - w_tilde(1.0)?).abs(),
        tolerance,
        pass: dh.max(dx) <= tolerance,
    };
    if let Some(base) = out(cfg) {
        let mut w = crate::output::sink(Some(base))?;
        for line in crate::output::header_lines(cfg, "pde") {
            writeln!(w, "# {line}")?;
        }
        field.write_csv(&mut w)?;
        w.flush()?;
    }
    let report_path = out(cfg).map(|b| sibling(b, ".report.json"));
    write_json(report_path.as_deref(), cfg, "pde", &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Check(format!("PDE marginal deviation {:.3e} > {tolerance:e}", report.max_deviation)))
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    target: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SelftestReport {
    level: &'static str,
    passed: usize,
    failed: Vec<String>,
    checks: Vec<Check>,
}

fn check(name: &str, value: f64, target: f64, tolerance: f64) -> Check {
    Check {
        name: name.to_string(),
        value,
        target,
        tolerance,
        pass: (value - target).abs() <= tolerance,
    }
}

pub fn selftest(cfg: &RunConfig, full: bool) -> Res<()> {
    let m = Marginals::new(cfg.k_max)?;
    let s = m.spectral();
    let up0 = NormalizedAiry::u_prime_at_zero();
    let mut checks = vec![
        check("trace_sum(3)", s.trace_sum(3)?.value, 2.0, 1e-8),
        check("trace_sum(2)", s.trace_sum(2)?.value, -2.0 / up0, 1e-8 * 2.0 / up0.abs()),
        check("trace_sum(4)", s.trace_sum(4)?.value, 2.0 / (up0 * up0), 1e-8 * 2.0 / (up0 * up0)),
        check("sum of weights", s.total_weight(), 1.0, 1e-10),
        check("key identity residual at 1", s.key_identity_residual(1.0)?.residual, 0.0, 1e-8),
        check("airy wronskian at -5", airy_pair(-5.0)?.wronskian(), std::f64::consts::FRAC_1_PI, 1e-12),
        check("airy wronskian at 5", airy_pair(5.0)?.wronskian(), std::f64::consts::FRAC_1_PI, 1e-12),
        check(
            "convolution route nu2(1)",
            KearneyKernel::laplace_matched()?.nu2_via_convolution(1.0)?,
            nu2(1.0)?,
            1e-6,
        ),
        check(
            "E[H] by quadrature",
            m.quadrature_moment(MarginalKind::HeightFixedTime, 1)?,
            moment_h(1)?,
            1e-5,
        ),
    ];
    for kind in MarginalKind::ALL {
        checks.push(check(&format!("normalization {kind}"), m.normalization(kind)?, 1.0, 1e-6));
    }
    let h = m.tail_report(MarginalKind::HeightFixedTime, HEIGHT_TAIL_RANGE)?;
    checks.push(check("height tail constant", h.fitted_slope, h.target, 0.03 * h.target));
    let x = m.tail_report(MarginalKind::PositionFixedTime, POSITION_TAIL_RANGE)?;
    checks.push(check("position tail constant", x.fitted_slope, x.target, 0.03 * x.target));
    let slope = m.nu1_slope_at_zero()?;
    checks.push(Check {
        name: "nu1 one-sided slope at 0 is positive".into(),
        value: slope,
        target: 0.0,
        tolerance: 0.0,
        pass: slope > 0.0,
    });

    if full {
        let field = solve_phi(cfg.pde_grid())?;
        let pm = pde_marginals(&field, s.delta_prime[0])?;
        let dev = field
            .h_grid
            .iter()
            .zip(&pm.height)
            .map(|(&h, v)| Ok((v - tsrm_core::marginals::nu2_hat(h)?).abs()))
            .collect::<Result<Vec<f64>, tsrm_core::Error>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(check("PDE height marginal", dev, 0.0, 1e-3));

        let mcfg = cfg.mc_config();
        let ens = sample_ensemble(1.0, &[], &mcfg)?;
        let (e, se) = mean_and_se(&target_weights(&ens, McTarget::U { h: 1.0 }, None)?)?;
        checks.push(check("MC u(1), 3 standard errors", e, NormalizedAiry::u(1.0)?, 3.0 * se));

        let ecfg = cfg.ensemble_config();
        let walks = tsaw_ensemble(&ecfg)?;
        let kind = match ecfg.mode {
            SamplingMode::FixedTime => MarginalKind::PositionFixedTime,
            SamplingMode::GeometricTime => MarginalKind::PositionExpTime,
        };
        let raw: Vec<f64> = walks.iter().map(|w| w.position as f64).collect();
        let table = CdfTable::new(&m, kind, 40.0, 4001)?;
        let (r, _) = calibrate_and_test(&raw, ecfg.n_steps as f64, kind, &m, &table)?;
        checks.push(check("lattice positions KS", r.ks_statistic, 0.0, 0.05));
    }

    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    let report = SelftestReport {
        level: if full { "full" } else { "quick" },
        passed: checks.len() - failed.len(),
        failed: failed.clone(),
        checks,
    };
    write_json(out(cfg), cfg, "selftest", &report)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}
