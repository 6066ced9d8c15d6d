//! Mittag-Leffler function E_α and the Mittag-Leffler probability density
//! f_α whose Laplace transform is E_α(-y).
//!
//! Both power series alternate and cancel badly for large arguments. Every
//! series evaluation tracks the largest term and refuses (with a range
//! error) once it exceeds [`CANCELLATION_LIMIT`] times the result. For
//! α = 2/3 the density switches to the Tricomi representation beyond
//! [`ML23_SWITCH`].

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::gamma::{gamma_fn, ln_gamma};
use super::tricomi::tricomi_u;
use crate::error::{domain, range, require_finite, Result};

/// Largest tolerated ratio between the biggest series term and the result.
pub const CANCELLATION_LIMIT: f64 = 1e8;

/// Series/Tricomi switch point for f_{2/3}.
pub const ML23_SWITCH: f64 = 3.0;

/// Evaluation settings for a Mittag-Leffler density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MittagLefflerSpec {
    pub alpha: f64,
    /// Maximum number of series terms.
    pub truncation: usize,
    /// Only meaningful for α = 2/3.
    pub switch_point: f64,
}

impl Default for MittagLefflerSpec {
    fn default() -> Self {
        Self {
            alpha: 2.0 / 3.0,
            truncation: 400,
            switch_point: ML23_SWITCH,
        }
    }
}

impl MittagLefflerSpec {
    pub fn density(&self, x: f64) -> Result<f64> {
        if is_two_thirds(self.alpha) {
            require_finite("ml_density", x)?;
            if x < 0.0 {
                return Err(domain("ml_density", format!("x = {x} must be nonnegative")));
            }
            if x > self.switch_point {
                return ml23_tail(x);
            }
            return series_density(self.alpha, x, self.truncation);
        }
        ml_density(self.alpha, x)
    }
}

fn is_two_thirds(alpha: f64) -> bool {
    (alpha - 2.0 / 3.0).abs() < 1e-15
}

/// E_α(y) = Σ_k y^k / Γ(αk + 1) for `α ∈ [0, 1]`, `y ≤ 0`.
pub fn ml_function(alpha: f64, y: f64) -> Result<f64> {
    require_finite("ml_function", alpha)?;
    require_finite("ml_function", y)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain("ml_function", format!("alpha = {alpha} outside [0, 1]")));
    }
    if y > 0.0 {
        return Err(domain("ml_function", format!("y = {y} must be nonpositive")));
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    if alpha == 0.0 {
        // Geometric series, summed in closed form.
        return Ok(1.0 / (1.0 - y));
    }
    let ln_y = (-y).ln();
    let mut sum = 1.0;
    let mut biggest: f64 = 1.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let arg = alpha * kf + 1.0;
        // Direct powers keep full relative accuracy while Γ is representable.
        let mag = if arg < 160.0 && kf * ln_y < 700.0 {
            (-y).powi(k as i32) / gamma_fn(arg)?
        } else {
            (kf * ln_y - ln_gamma(arg)?).exp()
        };
        let term = if k % 2 == 0 { mag } else { -mag };
        sum += term;
        biggest = biggest.max(mag);
        // A term this small relative to the largest one lies past the peak.
        if mag < 1e-17 * biggest.max(sum.abs()) {
            break;
        }
        k += 1;
        if k > 5000 {
            return Err(range("ml_function", format!("series did not settle for y = {y}")));
        }
    }
    if biggest > CANCELLATION_LIMIT * sum.abs() {
        return Err(range(
            "ml_function",
            format!("|y| = {} beyond the certified series range for alpha = {alpha}", -y),
        ));
    }
    Ok(sum)
}

/// f_α(x) by its power series for `α ∈ [0, 1)`, `x ≥ 0`.
///
/// For α = 2/3 this routes to the Tricomi branch beyond the switch point; for
/// other α a range error is returned once cancellation becomes excessive.
pub fn ml_density(alpha: f64, x: f64) -> Result<f64> {
    require_finite("ml_density", alpha)?;
    require_finite("ml_density", x)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain("ml_density", format!("alpha = {alpha} outside [0, 1)")));
    }
    if x < 0.0 {
        return Err(domain("ml_density", format!("x = {x} must be nonnegative")));
    }
    if alpha == 0.0 {
        return Ok((-x).exp());
    }
    if is_two_thirds(alpha) {
        return MittagLefflerSpec::default().density(x);
    }
    series_density(alpha, x, 2000)
}

fn series_density(alpha: f64, x: f64, max_terms: usize) -> Result<f64> {
    if is_two_thirds(alpha) {
        return ml23_series(x, max_terms);
    }
    let mut sum = 0.0;
    let mut biggest: f64 = 0.0;
    let ln_x = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    for k in 0..max_terms {
        let kf = k as f64;
        let s = ((kf + 1.0) * alpha * PI).sin();
        let ln_mag = ln_gamma((kf + 1.0) * alpha)? - ln_gamma(kf + 1.0)? + if k == 0 { 0.0 } else { kf * ln_x };
        let mag = ln_mag.exp();
        let term = if k % 2 == 0 { s * mag } else { -s * mag };
        sum += term;
        biggest = biggest.max(mag);
        if k > 2 && mag < 1e-18 * biggest.max(sum.abs()) {
            return finish_series(sum / PI, biggest / PI, x, alpha);
        }
        if x == 0.0 {
            return Ok(sum / PI);
        }
    }
    Err(range("ml_density", format!("series did not settle within {max_terms} terms at x = {x}")))
}

fn finish_series(value: f64, biggest: f64, x: f64, alpha: f64) -> Result<f64> {
    if biggest > CANCELLATION_LIMIT * value.abs() {
        return Err(range(
            "ml_density",
            format!("cancellation at x = {x} for alpha = {alpha}; use the Tricomi representation"),
        ));
    }
    Ok(value.max(0.0))
}

struct Ml23Coefficients {
    // c_k = sin((k+1)2π/3) Γ(2(k+1)/3) / (π k!), magnitude and sign split.
    mags: Vec<f64>,
    signs: Vec<f64>,
}

fn ml23_coefficients() -> &'static Ml23Coefficients {
    static TABLE: OnceLock<Ml23Coefficients> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 600;
        let half_root3 = 3f64.sqrt() / 2.0;
        let mut mags = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for k in 0..n {
            let kf = k as f64;
            let sin = match (k + 1) % 3 {
                1 => half_root3,
                2 => -half_root3,
                _ => 0.0,
            };
            let ln_mag = ln_gamma(2.0 * (kf + 1.0) / 3.0).expect("positive") - ln_gamma(kf + 1.0).expect("positive");
            mags.push(sin.abs() * ln_mag.exp() / PI);
            // (-x)^k sign folded in here.
            let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
            signs.push(sin.signum() * alt);
        }
        Ml23Coefficients { mags, signs }
    })
}

fn ml23_series(x: f64, max_terms: usize) -> Result<f64> {
    let c = ml23_coefficients();
    let n = max_terms.min(c.mags.len());
    let mut sum = 0.0;
    let mut biggest: f64 = 0.0;
    let mut pow = 1.0;
    for k in 0..n {
        let mag = c.mags[k] * pow;
        sum += c.signs[k] * mag;
        biggest = biggest.max(mag);
        if mag > 0.0 && mag < 1e-18 * biggest.max(sum.abs()) {
            return finish_series(sum, biggest, x, 2.0 / 3.0);
        }
        pow *= x;
    }
    if x == 0.0 {
        return Ok(sum);
    }
    Err(range("ml_density", format!("series did not settle within {n} terms at x = {x}")))
}

/// Prefactor 2^{1/3}/√(3π) of the Tricomi representation of f_{2/3}.
fn ml23_prefactor() -> f64 {
    2f64.cbrt() / (3.0 * PI).sqrt()
}

/// f_{2/3}(x) = 2^{1/3}/√(3π) · x · e^{-4x³/27} · U(1/6, 4/3; 4x³/27), evaluated
/// directly by quadrature.
pub fn ml23_density_tricomi(x: f64) -> Result<f64> {
    require_finite("ml23_density_tricomi", x)?;
    if x < 0.0 {
        return Err(domain("ml23_density_tricomi", format!("x = {x} must be nonnegative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let big = 4.0 * x.powi(3) / 27.0;
    Ok(ml23_prefactor() * x * (-big).exp() * tricomi_u(1.0 / 6.0, 4.0 / 3.0, big)?)
}

/// Upper end of the interpolated Tricomi range; beyond it the asymptotic
/// series of U is used directly (argument ≥ 60).
const TABLE_END: f64 = 7.5;
const TABLE_PIECES: usize = 9;
const TABLE_DEGREE: usize = 20;

struct ChebyshevPiece {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl ChebyshevPiece {
    fn fit(lo: f64, hi: f64, degree: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = degree + 1;
        let values: Vec<f64> = (0..n)
            .map(|j| {
                let t = (PI * (j as f64 + 0.5) / n as f64).cos();
                f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t)
            })
            .collect();
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                2.0 * s / n as f64
            })
            .collect();
        Self { lo, hi, coeffs }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + 0.5 * self.coeffs[0]
    }
}

/// Interpolant of Y^{1/6} U(1/6, 4/3; Y), Y = 4x³/27, on [switch, TABLE_END].
fn ml23_table() -> &'static [ChebyshevPiece] {
    static TABLE: OnceLock<Vec<ChebyshevPiece>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let width = (TABLE_END - ML23_SWITCH) / TABLE_PIECES as f64;
        (0..TABLE_PIECES)
            .map(|i| {
                let lo = ML23_SWITCH + width * i as f64;
                ChebyshevPiece::fit(lo, lo + width, TABLE_DEGREE, |x| {
                    let big = 4.0 * x.powi(3) / 27.0;
                    big.powf(1.0 / 6.0) * tricomi_u(1.0 / 6.0, 4.0 / 3.0, big).expect("U on table range")
                })
            })
            .collect()
    })
}

/// Tricomi branch of f_{2/3} for x beyond the series range.
fn ml23_tail(x: f64) -> Result<f64> {
    let big = 4.0 * x.powi(3) / 27.0;
    if big > 745.0 {
        return Ok(0.0);
    }
    let scaled_u = if x <= TABLE_END {
        let table = ml23_table();
        let width = (TABLE_END - ML23_SWITCH) / TABLE_PIECES as f64;
        let i = (((x - ML23_SWITCH) / width) as usize).min(TABLE_PIECES - 1);
        table[i].eval(x)
    } else {
        big.powf(1.0 / 6.0) * tricomi_u(1.0 / 6.0, 4.0 / 3.0, big)?
    };
    Ok(ml23_prefactor() * x * (-big).exp() * big.powf(-1.0 / 6.0) * scaled_u)
}

/// Γ-function closed form of the moments of F_α: m! / Γ(αm + 1).
pub fn ml_moment(alpha: f64, m: u32) -> Result<f64> {
    Ok(gamma_fn(m as f64 + 1.0)? / gamma_fn(alpha * m as f64 + 1.0)?)
}
