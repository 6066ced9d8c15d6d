//! Marginal densities of position and height at unit time (ν₁, ν₂) and at an
//! independent rate-one exponential time (ν̂₁, ν̂₂), with moments, CDFs,
//! rescaling to other times and tail constants.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::airy::NormalizedAiry;
use crate::error::{domain, range, require_finite, Error, Result};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::roots::safeguarded_newton;
use crate::special::{gamma_fn, ml_density, tricomi_u};
use crate::spectrum::{SpectralData, SpectralSum};

/// Beyond these arguments every density is below 1e-100 relative to its peak.
pub const HEIGHT_CAP: f64 = 6.5;
pub const HEIGHT_HAT_CAP: f64 = 25.0;
pub const POSITION_CAP: f64 = 16.0;
pub const POSITION_HAT_CAP: f64 = 320.0;

/// Default fit ranges for the cubic tail constants: far enough out for the
/// ln-correction to be resolved, close enough that the survival function is
/// still well above underflow.
pub const HEIGHT_TAIL_RANGE: (f64, f64) = (2.5, 4.0);
pub const POSITION_TAIL_RANGE: (f64, f64) = (5.0, 9.0);

const QUAD_TOL: Tolerance = Tolerance::new(1e-15, 1e-12);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalKind {
    /// ν₁: position at time 1.
    PositionFixedTime,
    /// ν₂: height at time 1.
    HeightFixedTime,
    /// ν̂₁: position at an exponential time.
    PositionExpTime,
    /// ν̂₂: height at an exponential time.
    HeightExpTime,
}

impl MarginalKind {
    pub const ALL: [MarginalKind; 4] = [
        MarginalKind::PositionFixedTime,
        MarginalKind::HeightFixedTime,
        MarginalKind::PositionExpTime,
        MarginalKind::HeightExpTime,
    ];

    pub fn is_position(self) -> bool {
        matches!(self, Self::PositionFixedTime | Self::PositionExpTime)
    }

    pub fn is_exp_time(self) -> bool {
        matches!(self, Self::PositionExpTime | Self::HeightExpTime)
    }

    /// Short name used on the command line and in file headers.
    pub fn name(self) -> &'static str {
        match self {
            Self::PositionFixedTime => "nu1",
            Self::HeightFixedTime => "nu2",
            Self::PositionExpTime => "nu1hat",
            Self::HeightExpTime => "nu2hat",
        }
    }

    /// Argument beyond which the density is negligible.
    pub fn cap(self) -> f64 {
        match self {
            Self::PositionFixedTime => POSITION_CAP,
            Self::HeightFixedTime => HEIGHT_CAP,
            Self::PositionExpTime => POSITION_HAT_CAP,
            Self::HeightExpTime => HEIGHT_HAT_CAP,
        }
    }

    /// Time exponent: argument scales like t^{exponent}.
    pub fn scaling_exponent(self) -> f64 {
        if self.is_position() {
            2.0 / 3.0
        } else {
            1.0 / 3.0
        }
    }
}

impl fmt::Display for MarginalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MarginalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nu1" | "position" => Ok(Self::PositionFixedTime),
            "nu2" | "height" => Ok(Self::HeightFixedTime),
            "nu1hat" | "nu1_hat" | "position_exp" => Ok(Self::PositionExpTime),
            "nu2hat" | "nu2_hat" | "height_exp" => Ok(Self::HeightExpTime),
            _ => Err(Error::Config(format!("unknown marginal kind '{s}'"))),
        }
    }
}

/// ν̂₂(h) = −2u(h)u'(h) = −(u²)'(h).
pub fn nu2_hat(h: f64) -> Result<f64> {
    require_finite("nu2_hat", h)?;
    if h < 0.0 {
        return Err(domain("nu2_hat", format!("h = {h} < 0")));
    }
    let (u, up) = NormalizedAiry::u_and_prime(h)?;
    Ok(-2.0 * u * up)
}

/// 2·6^{1/3}√π / Γ(1/3)².
pub fn nu2_constant() -> f64 {
    let g = gamma_fn(1.0 / 3.0).expect("Γ(1/3)");
    2.0 * 6f64.cbrt() * PI.sqrt() / (g * g)
}

/// ν₂(h) = (2·6^{1/3}√π/Γ(1/3)²)·e^{−8h³/9}·U(1/6, 2/3; 8h³/9).
pub fn nu2(h: f64) -> Result<f64> {
    require_finite("nu2", h)?;
    if h < 0.0 {
        return Err(domain("nu2", format!("h = {h} < 0")));
    }
    let y = 8.0 * h * h * h / 9.0;
    if y > 745.0 {
        return Ok(0.0);
    }
    Ok(nu2_constant() * (-y).exp() * tricomi_u(1.0 / 6.0, 2.0 / 3.0, y)?)
}

/// w̃(λ) = (u'(λ) − u'(0)u(λ)) / (λu'(λ)), the Laplace transform of `w`;
/// the removable singularity at λ = 0 takes the limit −u'(0).
pub fn w_tilde(lambda: f64) -> Result<f64> {
    require_finite("w_tilde", lambda)?;
    if lambda < 0.0 {
        return Err(domain("w_tilde", format!("lambda = {lambda} < 0")));
    }
    let up0 = NormalizedAiry::u_prime_at_zero();
    if lambda == 0.0 {
        return Ok(-up0);
    }
    let (u, up) = NormalizedAiry::u_and_prime(lambda)?;
    Ok((up - up0 * u) / (lambda * up))
}

/// E[H(1)ⁿ] = Γ(5/6)(2·3^{1/3})^{−n} n! / (Γ(n/3+1)Γ(n/3+5/6)).
pub fn moment_h(n: u32) -> Result<f64> {
    let nf = n as f64;
    let mut fact = 1.0;
    for i in 2..=n {
        fact *= i as f64;
    }
    Ok(gamma_fn(5.0 / 6.0)? * (2.0 * 3f64.cbrt()).powf(-nf) * fact
        / (gamma_fn(nf / 3.0 + 1.0)? * gamma_fn(nf / 3.0 + 5.0 / 6.0)?))
}

/// Time or rate rescaling of a marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledDensityQuery {
    pub kind: MarginalKind,
    /// Time t for fixed-time kinds, rate s for exponential-time kinds.
    pub t_or_s: f64,
    pub argument: f64,
}

/// Power-law tail constants of the fixed-time marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// −lim h⁻³ log P(H > h) = 8/9.
    pub height: f64,
    /// −lim x⁻³ log P(X > x) = (4/27)δ'₁³.
    pub position: f64,
    /// Stationary-increment counterpart (8/27)δ'₁³.
    pub position_stationary: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub kind: MarginalKind,
    pub constants: TailConstants,
    /// The constant the fit should recover.
    pub target: f64,
    /// Cubic coefficient of the least-squares fit a·x³ + b·ln x + c to −log P(· > x).
    pub fitted_slope: f64,
    pub fit_range: (f64, f64),
    pub relative_error: f64,
}

/// Closed-form marginals over a shared spectrum.
#[derive(Debug, Clone)]
pub struct Marginals {
    spectral: SpectralData,
}

impl Marginals {
    pub fn new(k_max: usize) -> Result<Self> {
        Ok(Self {
            spectral: SpectralData::new(k_max)?,
        })
    }

    pub fn from_spectrum(spectral: SpectralData) -> Self {
        Self { spectral }
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    /// ν̂₁(x) = Σ_k p_k (δ'_k/2) e^{−δ'_k|x|}, with the remainder bound.
    pub fn nu1_hat_sum(&self, x: f64) -> Result<SpectralSum> {
        require_finite("nu1_hat", x)?;
        let ax = x.abs();
        self.spectral.weighted_sum(|d| 0.5 * d * (-d * ax).exp())
    }

    pub fn nu1_hat(&self, x: f64) -> Result<f64> {
        Ok(self.nu1_hat_sum(x)?.value)
    }

    /// ν₁(x) = Σ_k p_k (δ'_k/2) f_{2/3}(δ'_k|x|), with the remainder bound.
    pub fn nu1_sum(&self, x: f64) -> Result<SpectralSum> {
        require_finite("nu1", x)?;
        let ax = x.abs();
        // The closure cannot propagate errors; f_{2/3} is total on [0, ∞).
        self.spectral
            .weighted_sum(|d| 0.5 * d * ml_density(2.0 / 3.0, d * ax).unwrap_or(f64::NAN))
    }

    pub fn nu1(&self, x: f64) -> Result<f64> {
        let s = self.nu1_sum(x)?;
        if !s.value.is_finite() {
            return Err(range("nu1", format!("non-finite value at x = {x}")));
        }
        Ok(s.value)
    }

    /// Right derivative of ν₁ at 0: f_{2/3}'(0)·(−u'(0)/2), positive.
    pub fn nu1_slope_at_zero(&self) -> Result<f64> {
        let f23_prime0 = -(4.0 * PI / 3.0).sin() * gamma_fn(4.0 / 3.0)? / PI;
        Ok(f23_prime0 * self.spectral.weighted_sum(|d| 0.5 * d * d)?.value)
    }

    /// w(x) = (|u'(0)|/2) Σ_k δ'_k⁻² e^{−δ'_k x}, the boundary value ν̂(x, 0).
    pub fn w_of_x(&self, x: f64) -> Result<f64> {
        require_finite("w_of_x", x)?;
        if x < 0.0 {
            return Err(domain("w_of_x", format!("x = {x} < 0")));
        }
        let up0 = NormalizedAiry::u_prime_at_zero();
        Ok(0.5 * up0.abs() * self.spectral.sum(|d| (-d * x).exp() / (d * d))?.value)
    }

    /// E|X(1)|ⁿ = Σ_k p_k n! / (δ'_kⁿ Γ(2n/3 + 1)).
    pub fn moment_abs_x(&self, n: u32) -> Result<SpectralSum> {
        let nf = n as f64;
        let mut fact = 1.0;
        for i in 2..=n {
            fact *= i as f64;
        }
        let scale = fact / gamma_fn(2.0 * nf / 3.0 + 1.0)?;
        let s = self.spectral.weighted_sum(|d| d.powi(-(n as i32)))?;
        Ok(SpectralSum {
            value: scale * s.value,
            truncated: scale * s.truncated,
            tail: scale * s.tail,
            tail_bound: scale * s.tail_bound,
        })
    }

    /// E|X̂|ⁿ at an exponential time: Σ_k p_k n! δ'_k⁻ⁿ.
    pub fn moment_abs_x_hat(&self, n: u32) -> Result<f64> {
        let mut fact = 1.0;
        for i in 2..=n {
            fact *= i as f64;
        }
        Ok(fact * self.spectral.weighted_sum(|d| d.powi(-(n as i32)))?.value)
    }

    pub fn density(&self, kind: MarginalKind, a: f64) -> Result<f64> {
        match kind {
            MarginalKind::PositionFixedTime => self.nu1(a),
            MarginalKind::PositionExpTime => self.nu1_hat(a),
            MarginalKind::HeightFixedTime => nu2(a),
            MarginalKind::HeightExpTime => nu2_hat(a),
        }
    }

    /// ϱ₁(t;x) = t^{−2/3}ν₁(t^{−2/3}x), ϱ₂(t;h) = t^{−1/3}ν₂(t^{−1/3}h),
    /// ϱ̂₁(s;x) = s^{2/3}ν̂₁(s^{2/3}x), ϱ̂₂(s;h) = s^{1/3}ν̂₂(s^{1/3}h).
    pub fn density_at_time(&self, q: ScaledDensityQuery) -> Result<f64> {
        require_finite("density_at_time", q.t_or_s)?;
        if q.t_or_s <= 0.0 {
            return Err(domain("density_at_time", format!("time/rate {} must be positive", q.t_or_s)));
        }
        let e = q.kind.scaling_exponent();
        let c = if q.kind.is_exp_time() {
            q.t_or_s.powf(e)
        } else {
            q.t_or_s.powf(-e)
        };
        Ok(c * self.density(q.kind, c * q.argument)?)
    }

    /// ∫_{lo}^{hi} of a density; `lo ≥ 0` for heights.
    fn integral(&self, kind: MarginalKind, lo: f64, hi: f64) -> Result<f64> {
        Ok(integrate(|x| self.density(kind, x).unwrap_or(f64::NAN), lo, hi, QUAD_TOL)?.value)
    }

    /// P(· ≤ a). Closed forms for the exponential-time marginals, adaptive
    /// quadrature otherwise.
    pub fn cdf(&self, kind: MarginalKind, a: f64) -> Result<f64> {
        if a.is_nan() {
            return Err(domain("cdf", "argument is NaN"));
        }
        match kind {
            MarginalKind::HeightExpTime => {
                if a <= 0.0 {
                    return Ok(0.0);
                }
                if a == f64::INFINITY {
                    return Ok(1.0);
                }
                let u = NormalizedAiry::u(a)?;
                Ok(1.0 - u * u)
            }
            MarginalKind::HeightFixedTime => {
                if a <= 0.0 {
                    Ok(0.0)
                } else if a >= HEIGHT_CAP {
                    Ok(1.0)
                } else if a > 1.5 {
                    Ok(1.0 - self.integral(kind, a, HEIGHT_CAP)?)
                } else {
                    self.integral(kind, 0.0, a)
                }
            }
            MarginalKind::PositionExpTime => {
                let ax = a.abs();
                let half_tail = if ax == f64::INFINITY {
                    0.0
                } else {
                    0.5 * self.spectral.weighted_sum(|d| (-d * ax).exp())?.value
                };
                Ok(if a >= 0.0 { 1.0 - half_tail } else { half_tail })
            }
            MarginalKind::PositionFixedTime => {
                let ax = a.abs().min(POSITION_CAP);
                let inner = self.integral(kind, 0.0, ax)?;
                Ok(if a >= 0.0 { 0.5 + inner } else { 0.5 - inner })
            }
        }
    }

    /// P(· > a) for a ≥ 0, integrated directly so deep tails keep their
    /// relative accuracy.
    pub fn survival(&self, kind: MarginalKind, a: f64) -> Result<f64> {
        require_finite("survival", a)?;
        if a < 0.0 {
            return Err(domain("survival", format!("a = {a} < 0")));
        }
        let f = |x: f64| self.density(kind, x).unwrap_or(f64::NAN);
        let tol = Tolerance::new(0.0, 1e-11);
        let q = match kind {
            MarginalKind::PositionExpTime => integrate_to_infinity(f, a, tol)?,
            _ => integrate(f, a, a + 4.0, tol)?,
        };
        Ok(q.value)
    }

    /// Inverse of [`cdf`](Self::cdf) for p ∈ (0, 1).
    pub fn quantile(&self, kind: MarginalKind, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("quantile", format!("p = {p} outside (0, 1)")));
        }
        if kind.is_position() && p < 0.5 {
            return Ok(-self.quantile(kind, 1.0 - p)?);
        }
        let lo = 0.0;
        let mut hi = 1.0;
        while self.cdf(kind, hi)? < p {
            hi *= 2.0;
            if hi > 4.0 * kind.cap() {
                return Err(range("quantile", format!("p = {p} too close to 1")));
            }
        }
        safeguarded_newton(
            |x| {
                let c = self.cdf(kind, x).unwrap_or(f64::NAN);
                let d = self.density(kind, x).unwrap_or(f64::NAN);
                (c - p, d)
            },
            lo,
            hi,
            None,
            1e-13,
        )
    }

    /// ∫ |a|ⁿ density(a) da by adaptive quadrature.
    pub fn quadrature_moment(&self, kind: MarginalKind, n: u32) -> Result<f64> {
        let cap = kind.cap();
        let f = |x: f64| x.powi(n as i32) * self.density(kind, x).unwrap_or(f64::NAN);
        let v = match kind {
            MarginalKind::PositionExpTime => integrate_to_infinity(f, 0.0, QUAD_TOL)?.value,
            _ => integrate(f, 0.0, cap, QUAD_TOL)?.value,
        };
        Ok(if kind.is_position() { 2.0 * v } else { v })
    }

    /// Total mass by adaptive quadrature.
    pub fn normalization(&self, kind: MarginalKind) -> Result<f64> {
        self.quadrature_moment(kind, 0)
    }

    pub fn tail_constants(&self) -> TailConstants {
        let d1 = self.spectral.delta_prime[0];
        TailConstants {
            height: 8.0 / 9.0,
            position: 4.0 / 27.0 * d1.powi(3),
            position_stationary: 8.0 / 27.0 * d1.powi(3),
        }
    }

    /// Fits −log P(· > a) = c₃a³ + c₁ ln a + c₀ over `fit_range`.
    pub fn tail_report(&self, kind: MarginalKind, fit_range: (f64, f64)) -> Result<TailReport> {
        let (lo, hi) = fit_range;
        if !(lo > 0.0 && hi > lo) || hi - lo < 0.5 {
            return Err(range("tail_report", format!("fit range [{lo}, {hi}] too small")));
        }
        let constants = self.tail_constants();
        let target = match kind {
            MarginalKind::HeightFixedTime => constants.height,
            MarginalKind::PositionFixedTime => constants.position,
            _ => return Err(domain("tail_report", format!("no cubic tail constant for {kind}"))),
        };
        let n = 31;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let a = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let s = self.survival(kind, a)?;
            if !(s > 0.0) {
                return Err(range("tail_report", format!("tail underflows at {a}")));
            }
            rows.push(([a.powi(3), a.ln(), 1.0], -s.ln()));
        }
        let coef = least_squares3(&rows)?;
        Ok(TailReport {
            kind,
            constants,
            target,
            fitted_slope: coef[0],
            fit_range,
            relative_error: (coef[0] / target - 1.0).abs(),
        })
    }
}

/// Least squares for three regressors via the normal equations.
fn least_squares3(rows: &[([f64; 3], f64)]) -> Result<[f64; 3]> {
    let mut a = [[0.0; 4]; 3];
    for (x, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += x[i] * x[j];
            }
            a[i][3] += x[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, piv);
        if a[col][col].abs() < 1e-300 {
            return Err(Error::Statistics("singular tail fit".into()));
        }
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Ok([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}
