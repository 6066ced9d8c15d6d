//! Confluent hypergeometric function of the second kind, from its real
//! integral representation
//!
//! ```text
//! U(a, b; z) = 1/Γ(a) ∫₀^∞ e^{-zs} s^{a-1} (1+s)^{b-a-1} ds,   a > 0, z ≥ 0.
//! ```
//!
//! The integral is split at `s = 1`. On `[0, 1]` the substitution `s = t^{1/a}`
//! removes the `s^{a-1}` singularity. On `[1, ∞)` we set `s = 1/t` and then
//! either `t = r^{1/(1-b)}` (b < 1, which also covers `z = 0`) or
//! `t = e^{-y}` (b ≥ 1, where `z > 0` is required). Large `z` switches to the
//! asymptotic series.

use serde::{Deserialize, Serialize};

use super::gamma::gamma_fn;
use crate::error::{domain, require_finite, Result};
use crate::quad::{integrate, Tolerance};

/// Arguments of a Tricomi evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TricomiParams {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl TricomiParams {
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        require_finite("tricomi_u", a)?;
        require_finite("tricomi_u", b)?;
        require_finite("tricomi_u", z)?;
        if a <= 0.0 {
            return Err(domain("tricomi_u", format!("a = {a} must be positive")));
        }
        if z < 0.0 {
            return Err(domain("tricomi_u", format!("z = {z} must be nonnegative")));
        }
        if z == 0.0 && b >= 1.0 {
            return Err(domain("tricomi_u", format!("U({a}, {b}; 0) diverges for b ≥ 1")));
        }
        Ok(Self { a, b, z })
    }

    pub fn eval(&self) -> Result<f64> {
        tricomi_u(self.a, self.b, self.z)
    }
}

/// Beyond this argument the asymptotic series is accurate to roughly
/// `e^{-z}` and replaces the quadrature.
const ASYMPTOTIC_FROM: f64 = 60.0;

const TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-13,
    max_intervals: 4000,
};

/// U(a, b; z) for `a > 0`, `z ≥ 0` (and `b < 1` when `z = 0`).
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    TricomiParams::new(a, b, z)?;
    if z >= ASYMPTOTIC_FROM {
        return Ok(asymptotic(a, b, z));
    }
    let c = b - a - 1.0;
    let inv_a = 1.0 / a;

    let head = integrate(
        |t: f64| {
            if t == 0.0 {
                return inv_a;
            }
            let s = t.powf(inv_a);
            inv_a * (-z * s).exp() * (1.0 + s).powf(c)
        },
        0.0,
        1.0,
        TOL,
    )?
    .value;

    let tail = if b < 1.0 {
        let m = 1.0 / (1.0 - b);
        integrate(
            |r: f64| {
                if r == 0.0 {
                    return if z == 0.0 { m } else { 0.0 };
                }
                let t = r.powf(m);
                let damp = if z == 0.0 { 1.0 } else { (-z / t).exp() };
                m * (1.0 + t).powf(c) * damp
            },
            0.0,
            1.0,
            TOL,
        )?
        .value
    } else {
        // s = e^y: integrand e^{-z e^y} e^{(b-1)y} (1 + e^{-y})^{b-a-1}.
        let y_max = (750.0 / z).ln().max(1.0);
        integrate(
            |y: f64| {
                let t = (-y).exp();
                let lnv = -z / t + (1.0 - b) * (-y) + c * (1.0 + t).ln();
                lnv.exp()
            },
            0.0,
            y_max,
            TOL,
        )?
        .value
    };

    Ok((head + tail) / gamma_fn(a)?)
}

/// z^{-a} Σ (a)_n (a-b+1)_n / n! (-z)^{-n}, truncated at the smallest term.
fn asymptotic(a: f64, b: f64, z: f64) -> f64 {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut last = 1.0_f64;
    for n in 0..200 {
        let nf = n as f64;
        let next = term * (a + nf) * (a - b + 1.0 + nf) / ((nf + 1.0) * -z);
        if next.abs() >= last || next.abs() < 1e-17 * sum.abs() {
            if next.abs() < last {
                sum += next;
            }
            break;
        }
        sum += next;
        last = next.abs();
        term = next;
    }
    z.powf(-a) * sum
}
