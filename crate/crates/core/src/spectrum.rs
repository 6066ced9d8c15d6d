//! Zeros of h ↦ u'(−h), the mixture weights built from them, and spectral
//! sums with a modeled remainder.
//!
//! The remainder beyond the computed zeros uses the asymptotic expansion of
//! the zeros of Ai',
//! `|a'_k| ≈ t^{2/3}(1 − 7/48 t⁻² + 35/288 t⁻⁴ − 181223/207360 t⁻⁶)`,
//! `t = 3π(4k−3)/8`, which is already accurate to ~1e-5 at k = 2 and to
//! machine precision beyond k ≈ 30. Terms are summed explicitly over a block
//! of modeled zeros and the rest is an integral with an Euler–Maclaurin
//! correction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::airy::NormalizedAiry;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::roots::safeguarded_newton;

pub const DEFAULT_K_MAX: usize = 50;
/// Modeled zeros summed explicitly past `k_max`.
pub const MODEL_BLOCK: usize = 2000;
/// Required |u'(−δ'_k)| at an accepted zero.
pub const ROOT_RESIDUAL: f64 = 1e-10;

const CBRT2: f64 = NormalizedAiry::SCALE;

/// Asymptotic k-th zero δ'_k (k may be fractional, k ≥ 1).
pub fn modeled_zero(k: f64) -> f64 {
    modeled_zero_order(k, 3)
}

/// Same expansion truncated after `order` correction terms.
fn modeled_zero_order(k: f64, order: usize) -> f64 {
    const C: [f64; 3] = [-7.0 / 48.0, 35.0 / 288.0, -181_223.0 / 207_360.0];
    let t = 3.0 * PI * (4.0 * k - 3.0) / 8.0;
    let t2 = 1.0 / (t * t);
    let mut corr = 1.0;
    let mut p = 1.0;
    for c in C.iter().take(order) {
        p *= t2;
        corr += c * p;
    }
    t.powf(2.0 / 3.0) * corr / CBRT2
}

/// Leading-order zero ½(3πk)^{2/3}.
pub fn leading_zero(k: f64) -> f64 {
    0.5 * (3.0 * PI * k).powf(2.0 / 3.0)
}

/// A remainder estimate with a bound on its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSum {
    pub value: f64,
    pub bound: f64,
}

/// A spectral sum: the explicit part over computed zeros plus the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSum {
    pub value: f64,
    pub truncated: f64,
    pub tail: f64,
    pub tail_bound: f64,
}

/// The first `k_max` zeros δ'_k and weights p_k = u'(0)²/2 · δ'_k⁻⁴.
///
/// Immutable after construction; safe to share between threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub k_max: usize,
    pub delta_prime: Vec<f64>,
    pub p: Vec<f64>,
    /// Remainder Σ_{k>k_max} p_k.
    pub tail_estimate: f64,
    /// Error bound of `tail_estimate`.
    pub tail_bound: f64,
    #[serde(skip)]
    model: Vec<f64>,
}

/// Computes the first `k_max` zeros.
pub fn spectrum(k_max: usize) -> Result<SpectralData> {
    SpectralData::new(k_max)
}

impl SpectralData {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(domain("spectrum", "k_max must be at least 1"));
        }
        let delta_prime = find_zeros(k_max)?;
        let c = weight_constant();
        let p = delta_prime.iter().map(|d| c * d.powi(-4)).collect();
        let model = (k_max + 1..=k_max + MODEL_BLOCK).map(|k| modeled_zero(k as f64)).collect();
        let mut data = Self {
            k_max,
            delta_prime,
            p,
            tail_estimate: 0.0,
            tail_bound: 0.0,
            model,
        };
        let tail = data.remainder(|d| c * d.powi(-4))?;
        data.tail_estimate = tail.value;
        data.tail_bound = tail.bound;
        Ok(data)
    }

    /// Σ_k p_k including the remainder; equals 1.
    pub fn total_weight(&self) -> f64 {
        self.p.iter().sum::<f64>() + self.tail_estimate
    }

    /// Σ_{k>k_max} g(δ'_k) from the modeled zeros.
    ///
    /// `g` must be eventually monotone and, once it returns exactly zero,
    /// stay zero for larger arguments. The bound combines the model error
    /// (estimated from the first modeled terms), the Euler–Maclaurin
    /// remainder and the quadrature error.
    pub fn remainder<G: Fn(f64) -> f64>(&self, g: G) -> Result<TailSum> {
        let k0 = self.k_max as f64;
        let mut value = 0.0;
        let mut model_err = 0.0;
        let mut last = 0.0;
        let mut exhausted = false;
        for (j, &d) in self.model.iter().enumerate() {
            let term = g(d);
            if j < 20 {
                let k = k0 + 1.0 + j as f64;
                model_err += (term - g(modeled_zero_order(k, 2))).abs();
            }
            if term == 0.0 && j > 0 {
                exhausted = true;
                break;
            }
            value += term;
            last = term;
        }
        let mut bound = model_err + 1e-15 * value.abs();
        if !exhausted {
            let m = k0 + self.model.len() as f64;
            let a = m + 0.5;
            let next = g(modeled_zero(m + 1.0));
            if next != 0.0 {
                let q = integrate(
                    |r| {
                        if r <= 0.0 {
                            return 0.0;
                        }
                        let v = 3.0 * a * r.powi(-4) * g(modeled_zero(a / (r * r * r)));
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    },
                    0.0,
                    1.0,
                    Tolerance::new(1e-300, 1e-12),
                )?;
                let em = (next - last) / 24.0;
                value += q.value + em;
                bound += q.error + em.abs() / a;
            }
        }
        Ok(TailSum { value, bound })
    }

    /// Σ_{k≤k_max} g(δ'_k) plus the remainder.
    pub fn sum<G: Fn(f64) -> f64>(&self, g: G) -> Result<SpectralSum> {
        let truncated: f64 = self.delta_prime.iter().map(|&d| g(d)).sum();
        let tail = self.remainder(&g)?;
        Ok(SpectralSum {
            value: truncated + tail.value,
            truncated,
            tail: tail.value,
            tail_bound: tail.bound,
        })
    }

    /// Weighted sum Σ_k p_k g(δ'_k) plus the remainder.
    pub fn weighted_sum<G: Fn(f64) -> f64>(&self, g: G) -> Result<SpectralSum> {
        let c = weight_constant();
        self.sum(|d| c * d.powi(-4) * g(d))
    }

    /// Σ_k δ'_k⁻ⁿ; converges for n ≥ 2.
    pub fn trace_sum(&self, n: i32) -> Result<SpectralSum> {
        if n < 2 {
            return Err(domain("trace_sum", format!("n = {n} < 2: the series diverges")));
        }
        self.sum(|d| d.powi(-n))
    }

    /// |u''(z)/u'(z) + Σ_k (1/δ'_k)·z/(δ'_k + z)|.
    pub fn key_identity_residual(&self, z: f64) -> Result<KeyIdentityResidual> {
        if !z.is_finite() {
            return Err(domain("key_identity_residual", format!("z = {z}")));
        }
        let d1 = self.delta_prime[0];
        if z <= -d1 && self.delta_prime.iter().any(|&d| ((z + d) / d).abs() < 1e-12) {
            return Err(domain("key_identity_residual", format!("z = {z} is a pole")));
        }
        let (u, up) = NormalizedAiry::u_and_prime(z)?;
        if up == 0.0 {
            return Err(domain("key_identity_residual", format!("u'(z) = 0 at z = {z}")));
        }
        let lhs = 2.0 * z * u / up;
        let s = self.sum(|d| z / (d * (d + z)))?;
        Ok(KeyIdentityResidual {
            residual: (lhs + s.value).abs(),
            truncated_residual: (lhs + s.truncated).abs(),
            tail_bound: s.tail_bound,
        })
    }
}

/// Residual of the key identity, with and without the modeled remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyIdentityResidual {
    pub residual: f64,
    pub truncated_residual: f64,
    pub tail_bound: f64,
}

/// Σ_k δ'_k⁻ⁿ using `k_max` zeros.
pub fn trace_sum(n: i32, k_max: usize) -> Result<SpectralSum> {
    spectrum(k_max)?.trace_sum(n)
}

pub fn key_identity_residual(z: f64, k_max: usize) -> Result<KeyIdentityResidual> {
    spectrum(k_max)?.key_identity_residual(z)
}

/// u'(0)²/2.
pub fn weight_constant() -> f64 {
    let up0 = NormalizedAiry::u_prime_at_zero();
    0.5 * up0 * up0
}

/// g(h) = u'(−h) and g'(h) = 2h·u(−h).
fn derivative_at_reflected(h: f64) -> (f64, f64) {
    match NormalizedAiry::u_and_prime(-h) {
        Ok((u, up)) => (up, 2.0 * h * u),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

/// Scans for sign changes of u'(−h) with a step well below the local zero
/// spacing, then polishes each bracket by safeguarded Newton.
fn find_zeros(k_max: usize) -> Result<Vec<f64>> {
    let mut zeros = Vec::with_capacity(k_max);
    let spacing = |h: f64| PI / (CBRT2.powf(1.5) * h.max(0.5).sqrt());
    let mut a = 0.0;
    let (mut ga, _) = derivative_at_reflected(a);
    while zeros.len() < k_max {
        let k = zeros.len() + 1;
        let b = a + 0.2 * spacing(a);
        let (gb, _) = derivative_at_reflected(b);
        if !gb.is_finite() {
            return Err(Error::Convergence {
                what: "spectrum",
                detail: format!("non-finite u' at h = {b}"),
            });
        }
        if ga.signum() != gb.signum() || gb == 0.0 {
            let seed = leading_zero(k as f64);
            let seed = (seed > a && seed < b).then_some(seed);
            let root = safeguarded_newton(derivative_at_reflected, a, b, seed, 1e-15)?;
            let (res, _) = derivative_at_reflected(root);
            if res.abs() >= ROOT_RESIDUAL {
                return Err(Error::Convergence {
                    what: "spectrum",
                    detail: format!("zero {k} at {root} leaves |u'| = {res:e}"),
                });
            }
            zeros.push(root);
            // Restart just past the root, on the far side of the sign change.
            a = root + 0.05 * spacing(root);
            ga = derivative_at_reflected(a).0;
        } else {
            a = b;
            ga = gb;
        }
        if a > 1e6 {
            return Err(Error::Convergence {
                what: "spectrum",
                detail: "zero scan ran away".into(),
            });
        }
    }
    Ok(zeros)
}
