//! Goodness of fit: tabulated reference CDFs, the Kolmogorov–Smirnov
//! statistic and its asymptotic p-value, histograms, and the one-parameter
//! scale calibration of lattice samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::{nu2_hat, MarginalKind, Marginals};
use crate::quad::{integrate, Tolerance};

/// Piecewise cubic Hermite CDF on a uniform grid over [0, cap], using the
/// density as the slope. Position kinds are symmetrized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdfTable {
    pub kind: MarginalKind,
    pub step: f64,
    /// F at the nodes (for positions: F restricted to x ≥ 0).
    pub cdf: Vec<f64>,
    pub density: Vec<f64>,
}

impl CdfTable {
    pub fn new(m: &Marginals, kind: MarginalKind, cap: f64, nodes: usize) -> Result<Self> {
        if nodes < 3 || !(cap > 0.0) {
            return Err(Error::Config("CDF table needs at least 3 nodes and a positive cap".into()));
        }
        let step = cap / (nodes - 1) as f64;
        let density: Vec<f64> = (0..nodes).map(|i| m.density(kind, i as f64 * step)).collect::<Result<_>>()?;
        let mut cdf = Vec::with_capacity(nodes);
        let mut acc = if kind.is_position() { 0.5 } else { 0.0 };
        cdf.push(acc);
        let tol = Tolerance::new(1e-16, 1e-13);
        for i in 1..nodes {
            let (a, b) = ((i - 1) as f64 * step, i as f64 * step);
            acc += integrate(|x| m.density(kind, x).unwrap_or(f64::NAN), a, b, tol)?.value;
            cdf.push(acc);
        }
        Ok(Self {
            kind,
            step,
            cdf,
            density,
        })
    }

    pub fn eval(&self, a: f64) -> f64 {
        if self.kind.is_position() && a < 0.0 {
            return 1.0 - self.eval(-a);
        }
        if a <= 0.0 {
            return self.cdf[0].min(if self.kind.is_position() { 0.5 } else { 0.0 });
        }
        let t = a / self.step;
        let i = t.floor() as usize;
        if i + 1 >= self.cdf.len() {
            return *self.cdf.last().expect("non-empty");
        }
        let s = t - i as f64;
        let (f0, f1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.density[i] * self.step, self.density[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * d1
    }
}

/// sup |F_n − F| of a sample against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Statistics("empty sample".into()));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::Statistics("sample contains NaN".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // Ties: the empirical CDF jumps once per distinct value.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Equal-width bins over [lo, hi]; out-of-range values go to the end bins.
    pub fn new(sample: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(hi > lo) {
            return Err(Error::Statistics("histogram needs bins > 0 and hi > lo".into()));
        }
        let w = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + w * i as f64).collect();
        let mut counts = vec![0; bins];
        for &x in sample {
            let k = ((x - lo) / w).floor();
            let k = if k.is_nan() || k < 0.0 { 0 } else { (k as usize).min(bins - 1) };
            counts[k] += 1;
        }
        Ok(Self { edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub order: u32,
    pub sample: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub kind: MarginalKind,
    pub n: usize,
    #[serde(rename = "ks")]
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    /// Fitted α̂ (1 when no calibration was requested).
    #[serde(rename = "alpha_hat")]
    pub calibrated_scale: f64,
    pub histogram: Histogram,
    pub moment_checks: Vec<MomentCheck>,
}

/// E|·| of a marginal in closed form.
pub fn first_absolute_moment(m: &Marginals, kind: MarginalKind) -> Result<f64> {
    Ok(match kind {
        MarginalKind::PositionFixedTime => m.moment_abs_x(1)?.value,
        MarginalKind::PositionExpTime => m.moment_abs_x_hat(1)?,
        MarginalKind::HeightFixedTime => crate::marginals::moment_h(1)?,
        // E[Ĥ] = ∫ h ν̂₂ = ∫ u².
        MarginalKind::HeightExpTime => {
            integrate(|h| h * nu2_hat(h).unwrap_or(f64::NAN), 0.0, kind.cap(), Tolerance::default())?.value
        }
    })
}

/// Scales raw lattice observations by (α̂n)^{−e} with e = 2/3 (positions) or
/// 1/3 (heights), choosing α̂ so the first absolute moment matches the
/// closed form; then runs the KS test against `kind`.
pub fn calibrate_and_test(
    raw: &[f64],
    n: f64,
    kind: MarginalKind,
    m: &Marginals,
    table: &CdfTable,
) -> Result<(GofReport, Vec<f64>)> {
    if raw.len() < 1000 {
        return Err(Error::Statistics(format!("need ≥ 1000 samples, got {}", raw.len())));
    }
    if table.kind != kind {
        return Err(Error::Config("CDF table kind does not match".into()));
    }
    let mean_abs = raw.iter().map(|x| x.abs()).sum::<f64>() / raw.len() as f64;
    if !(mean_abs > 0.0) {
        return Err(Error::Statistics("degenerate sample".into()));
    }
    let target = first_absolute_moment(m, kind)?;
    let e = kind.scaling_exponent();
    // mean_abs = (α̂n)^e · target
    let alpha = (mean_abs / target).powf(1.0 / e) / n;
    let scale = (alpha * n).powf(-e);
    let scaled: Vec<f64> = raw.iter().map(|x| x * scale).collect();
    let report = test_sample(&scaled, kind, m, table, alpha)?;
    Ok((report, scaled))
}

/// KS test, histogram and second-moment check of an already scaled sample.
pub fn test_sample(sample: &[f64], kind: MarginalKind, m: &Marginals, table: &CdfTable, alpha: f64) -> Result<GofReport> {
    let ks = ks_statistic(sample, |x| table.eval(x))?;
    let n = sample.len();
    let (lo, hi) = if kind.is_position() { (-4.0, 4.0) } else { (0.0, 3.0) };
    let histogram = Histogram::new(sample, lo, hi, 80)?;
    let moment = |p: i32| sample.iter().map(|x| x.abs().powi(p)).sum::<f64>() / n as f64;
    let mut moment_checks = vec![MomentCheck {
        order: 1,
        sample: moment(1),
        target: first_absolute_moment(m, kind)?,
    }];
    let second = match kind {
        MarginalKind::PositionFixedTime => Some(m.moment_abs_x(2)?.value),
        MarginalKind::PositionExpTime => Some(m.moment_abs_x_hat(2)?),
        MarginalKind::HeightFixedTime => Some(crate::marginals::moment_h(2)?),
        MarginalKind::HeightExpTime => None,
    };
    if let Some(t) = second {
        moment_checks.push(MomentCheck {
            order: 2,
            sample: moment(2),
            target: t,
        });
    }
    Ok(GofReport {
        kind,
        n,
        ks_statistic: ks,
        ks_p_value: ks_p_value(ks, n),
        calibrated_scale: alpha,
        histogram,
        moment_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_uniform_grid() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
        assert!(ks_p_value(d, n) > 0.99);
        assert!(ks_p_value(0.2, 1000) < 1e-10);
        assert!(ks_statistic(&[], |x| x).is_err());
    }

    #[test]
    fn ks_p_value_reference() {
        // Q(1.36) ≈ 0.0494 (the classical 5% point).
        let n = 1_000_000;
        let d = 1.358 / (n as f64).sqrt();
        assert!((ks_p_value(d, n) - 0.05).abs() < 2e-3);
    }

    #[test]
    fn histogram_counts() {
        let xs = [-10.0, 0.1, 0.2, 0.9, 5.0];
        let h = Histogram::new(&xs, 0.0, 1.0, 4).unwrap();
        assert_eq!(h.total(), xs.len() as u64);
        assert_eq!(h.counts, vec![3, 0, 0, 2]);
        assert!(Histogram::new(&xs, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn cdf_table_matches_closed_form() {
        let m = Marginals::new(50).unwrap();
        for kind in [MarginalKind::PositionExpTime, MarginalKind::HeightExpTime] {
            let t = CdfTable::new(&m, kind, 12.0, 1201).unwrap();
            for &a in &[0.05, 0.4, 1.3, 2.7] {
                assert!((t.eval(a) - m.cdf(kind, a).unwrap()).abs() < 1e-9, "{kind} {a}");
                if kind.is_position() {
                    assert!((t.eval(-a) - m.cdf(kind, -a).unwrap()).abs() < 1e-9);
                }
            }
        }
    }
}
