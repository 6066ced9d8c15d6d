//! The transform chain behind the closed forms: the Laplace-domain solution
//! φ̃(λ, h), the kernel f whose Laplace transform is h ↦ u(h^{1/3}), its
//! self-convolution, and the exponential-time transform that maps fixed-time
//! densities to their exponential-time counterparts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::airy::{CompanionSolution, NormalizedAiry};
use crate::error::{domain, range, require_finite, Result};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::special::{gamma_fn, tricomi_u};

/// Default cutoff of the χ-integrals in [`phi_tilde`]; u(12)² ≈ 1e-37.
pub const CHI_MAX: f64 = 12.0;

const TOL: Tolerance = Tolerance::new(1e-15, 1e-12);

fn u_or_nan(h: f64) -> f64 {
    NormalizedAiry::u(h).unwrap_or(f64::NAN)
}

/// φ̃(λ, h) = ∫₀^∞ e^{−λx} φ(x, h) dx from the Airy representation
///
/// `−1/(u(λ)u'(λ)) · { u(λ+h)[∫₀^∞ u(λ+χ)u(χ)dχ + ∫₀ʰ v_λ(λ+χ)u(χ)dχ] + v_λ(λ+h)∫ₕ^∞ u(λ+χ)u(χ)dχ }`.
///
/// The infinite integrals are cut at `chi_max`; beyond it the integrand is
/// below u(chi_max)².
pub fn phi_tilde(lambda: f64, h: f64, chi_max: f64) -> Result<f64> {
    require_finite("phi_tilde", lambda)?;
    require_finite("phi_tilde", h)?;
    if lambda <= 0.0 {
        return Err(domain("phi_tilde", format!("lambda = {lambda} must be positive")));
    }
    if h < 0.0 || h > chi_max {
        return Err(domain("phi_tilde", format!("h = {h} outside [0, {chi_max}]")));
    }
    let v = CompanionSolution::new(lambda)?;
    // The integrands scale like u(λ), which is tiny for large λ: relative tolerance only.
    let tol = Tolerance::new(0.0, 1e-12);
    let uu = |chi: f64| u_or_nan(lambda + chi) * u_or_nan(chi);
    let whole = integrate(uu, 0.0, chi_max, tol)?.value;
    let upper = integrate(uu, h, chi_max, tol)?.value;
    let lower = if h > 0.0 {
        integrate(|chi| v.eval(lambda + chi).unwrap_or(f64::NAN) * u_or_nan(chi), 0.0, h, tol)?.value
    } else {
        0.0
    };
    let (ul, upl) = NormalizedAiry::u_and_prime(lambda)?;
    let value = -(u_or_nan(lambda + h) * (whole + lower) + v.eval(lambda + h)? * upper) / (ul * upl);
    if !value.is_finite() {
        return Err(range("phi_tilde", format!("non-finite value at ({lambda}, {h})")));
    }
    Ok(value)
}

/// f(s) = C s^{−4/3} e^{−2/(9s)}, normalized so that ∫₀^∞ e^{−hs} f(s) ds = u(h^{1/3}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KearneyKernel {
    pub c: f64,
}

impl KearneyKernel {
    /// C fixed by matching the Laplace transform at h = 1 with u(1).
    pub fn laplace_matched() -> Result<Self> {
        let raw = laplace_of_unnormalized(1.0)?;
        Ok(Self {
            c: NormalizedAiry::u(1.0)? / raw,
        })
    }

    /// C = 1 / (Γ(1/3)(9/2)^{1/3}), from u(0) = 1 (total mass of f).
    pub fn analytic_constant() -> f64 {
        1.0 / (gamma_fn(1.0 / 3.0).expect("Γ(1/3)") * 4.5f64.cbrt())
    }

    pub fn f(&self, s: f64) -> Result<f64> {
        require_finite("kearney_f", s)?;
        if s <= 0.0 {
            return Err(domain("kearney_f", format!("s = {s} must be positive")));
        }
        Ok(self.c * unnormalized(s))
    }

    /// ∫₀^∞ e^{−hs} f(s) ds by quadrature.
    pub fn laplace(&self, h: f64) -> Result<f64> {
        Ok(self.c * laplace_of_unnormalized(h)?)
    }

    /// (f∗f)(s) = ∫₀^s f(r) f(s−r) dr by adaptive quadrature (symmetric halves).
    pub fn convolution_direct(&self, s: f64) -> Result<f64> {
        require_finite("f_convolution", s)?;
        if s <= 0.0 {
            return Err(domain("f_convolution", format!("s = {s} must be positive")));
        }
        let g = |r: f64| {
            if r <= 0.0 || r >= s {
                0.0
            } else {
                unnormalized(r) * unnormalized(s - r)
            }
        };
        let half = integrate(g, 0.0, 0.5 * s, Tolerance::new(0.0, 1e-13))?.value;
        Ok(2.0 * self.c * self.c * half)
    }

    /// C' = 2(9/2)^{1/3}√π C², the constant of the closed-form convolution.
    pub fn convolution_constant(&self) -> f64 {
        2.0 * 4.5f64.cbrt() * PI.sqrt() * self.c * self.c
    }

    /// (f∗f)(s) = C' s^{−4/3} e^{−8/(9s)} U(1/6, 2/3; 8/(9s)).
    pub fn convolution_closed(&self, s: f64) -> Result<f64> {
        require_finite("f_convolution", s)?;
        if s <= 0.0 {
            return Err(domain("f_convolution", format!("s = {s} must be positive")));
        }
        let z = 8.0 / (9.0 * s);
        if z > 745.0 {
            return Ok(0.0);
        }
        Ok(self.convolution_constant() * s.powf(-4.0 / 3.0) * (-z).exp() * tricomi_u(1.0 / 6.0, 2.0 / 3.0, z)?)
    }

    /// ν₂(h) = 3h⁻⁴ (f∗f)(h⁻³), using the direct convolution.
    pub fn nu2_via_convolution(&self, h: f64) -> Result<f64> {
        if h <= 0.0 {
            return Err(domain("nu2_via_convolution", format!("h = {h} must be positive")));
        }
        Ok(3.0 * h.powi(-4) * self.convolution_direct(h.powi(-3))?)
    }
}

fn unnormalized(s: f64) -> f64 {
    s.powf(-4.0 / 3.0) * (-2.0 / (9.0 * s)).exp()
}

fn laplace_of_unnormalized(h: f64) -> Result<f64> {
    require_finite("kearney laplace", h)?;
    if h < 0.0 {
        return Err(domain("kearney laplace", format!("h = {h} < 0")));
    }
    // The s^{-4/3} tail makes the h = 0 integral converge slowly; map s = 1/t.
    let tail = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let s = 1.0 / t;
        (-h * s).exp() * unnormalized(s) / (t * t)
    };
    let near = integrate(|s| if s <= 0.0 { 0.0 } else { (-h * s).exp() * unnormalized(s) }, 0.0, 1.0, TOL)?;
    let far = integrate(tail, 0.0, 1.0, TOL)?;
    Ok(near.value + far.value)
}

/// Convenience forms with the Laplace-matched constant.
pub fn kearney_f(s: f64) -> Result<f64> {
    KearneyKernel::laplace_matched()?.f(s)
}

pub fn f_convolution(s: f64) -> Result<f64> {
    KearneyKernel::laplace_matched()?.convolution_direct(s)
}

/// Trapezoidal Laplace transform ∫ e^{−λx} g(x) dx of a tabulated function on
/// an increasing grid. With `tail_rate = Some(r)` the function is continued
/// beyond the last node as g(x_n)e^{−r(x−x_n)}.
pub fn numerical_laplace(xs: &[f64], values: &[f64], lambda: f64, tail_rate: Option<f64>) -> Result<f64> {
    if xs.len() != values.len() || xs.len() < 2 {
        return Err(domain("numerical_laplace", "need at least two matching nodes"));
    }
    let mut s = 0.0;
    for k in 1..xs.len() {
        let dx = xs[k] - xs[k - 1];
        if dx <= 0.0 {
            return Err(domain("numerical_laplace", "grid must be increasing"));
        }
        s += 0.5 * dx * ((-lambda * xs[k - 1]).exp() * values[k - 1] + (-lambda * xs[k]).exp() * values[k]);
    }
    if let Some(r) = tail_rate {
        let last = xs.len() - 1;
        if lambda + r <= 0.0 {
            return Err(range("numerical_laplace", "tail does not decay"));
        }
        s += values[last] * (-lambda * xs[last]).exp() / (lambda + r);
    }
    Ok(s)
}

/// ∫₀^∞ e^{−t} t^{−β} g(t^{−β} a) dt for β ∈ (0, 1).
///
/// The substitution t = r^{1/(1−β)} removes the t^{−β} endpoint singularity,
/// leaving (1/(1−β)) e^{−t} g(t^{−β} a) in r.
pub fn exp_time_transform<G>(g: G, beta: f64, a: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    require_finite("exp_time_transform", a)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain("exp_time_transform", format!("beta = {beta} outside (0, 1)")));
    }
    let p = 1.0 / (1.0 - beta);
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let t = r.powf(p);
        let e = (-t).exp();
        if e == 0.0 {
            return 0.0;
        }
        let arg = t.powf(-beta) * a;
        match g(arg) {
            Ok(v) => p * e * v,
            Err(_) => f64::NAN,
        }
    };
    let head = integrate(integrand, 0.0, 1.0, TOL)?;
    let tail = integrate_to_infinity(integrand, 1.0, TOL)?;
    let value = head.value + tail.value;
    if !value.is_finite() {
        return Err(range("exp_time_transform", format!("divergent transform at a = {a}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::{nu2, w_tilde};

    #[test]
    fn kernel_constant_and_laplace() {
        let k = KearneyKernel::laplace_matched().unwrap();
        assert!((k.c / KearneyKernel::analytic_constant() - 1.0).abs() < 1e-10);
        for &h in &[0.0_f64, 0.5, 2.0, 8.0] {
            let want = NormalizedAiry::u(h.cbrt()).unwrap();
            assert!((k.laplace(h).unwrap() - want).abs() < 1e-10, "h = {h}");
        }
        assert!(k.f(0.0).is_err() && k.f(-1.0).is_err());
    }

    #[test]
    fn convolution_two_ways() {
        let k = KearneyKernel::laplace_matched().unwrap();
        for &s in &[0.125, 0.5, 1.0, 2.0, 8.0] {
            let a = k.convolution_direct(s).unwrap();
            let b = k.convolution_closed(s).unwrap();
            assert!((a / b - 1.0).abs() < 1e-9, "s = {s}: {a} vs {b}");
        }
        let c = nu2(1.0).unwrap();
        assert!((k.nu2_via_convolution(1.0).unwrap() / c - 1.0).abs() < 1e-9);
        // 3C' equals the normalizing constant of ν₂.
        assert!((3.0 * k.convolution_constant() / crate::marginals::nu2_constant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phi_tilde_boundary_equals_w_tilde() {
        for &l in &[0.5, 1.0, 2.0] {
            let a = phi_tilde(l, 0.0, CHI_MAX).unwrap();
            let b = w_tilde(l).unwrap();
            assert!((a - b).abs() < 1e-10, "λ = {l}: {a} vs {b}");
        }
        assert!(phi_tilde(0.0, 1.0, CHI_MAX).is_err());
    }

    #[test]
    fn phi_tilde_large_lambda() {
        let l = 20.0;
        for &h in &[0.5, 1.0, 2.0] {
            let r = phi_tilde(l, h, CHI_MAX).unwrap() * l / NormalizedAiry::u(h).unwrap();
            assert!((r - 1.0).abs() < 0.05, "h = {h}: {r}");
        }
        // At h = 0 the Neumann boundary layer of width ~λ^{-1/2} slows the
        // approach: λφ̃(λ, 0) = 1 − u'(0)u(λ)/u'(λ) → 1 only like λ^{-1/2}.
        let (u, up) = NormalizedAiry::u_and_prime(l).unwrap();
        let exact = 1.0 - NormalizedAiry::u_prime_at_zero() * u / up;
        assert!((phi_tilde(l, 0.0, CHI_MAX).unwrap() * l - exact).abs() < 1e-10);
        assert!(exact < 0.9);
    }

    #[test]
    fn laplace_of_exponential() {
        let xs: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.001).collect();
        let vs: Vec<f64> = xs.iter().map(|x| (-2.0 * x).exp()).collect();
        let got = numerical_laplace(&xs, &vs, 1.0, Some(2.0)).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-6);
        assert!(numerical_laplace(&xs[..1], &vs[..1], 1.0, None).is_err());
    }

    #[test]
    fn exp_time_transform_of_gamma_shape() {
        // g(y) = e^{−y} with β = 1/2 at a = 0 gives Γ(1/2).
        let v = exp_time_transform(|y| Ok((-y).exp()), 0.5, 0.0).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-10);
        assert!(exp_time_transform(Ok, 1.0, 1.0).is_err());
    }
}
