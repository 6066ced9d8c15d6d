//! Bracketed one-dimensional root finding.

use crate::error::{Error, Result};

/// Newton iteration kept inside a sign-change bracket; any step that would
/// leave the bracket, or that fails to halve the residual, is replaced by a
/// bisection step.
///
/// `f` returns `(value, derivative)`. `seed` is used as the starting point
/// when it lies inside `[lo, hi]`, otherwise the midpoint is used.
pub fn safeguarded_newton<F>(mut f: F, lo: f64, hi: f64, seed: Option<f64>, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Convergence {
            what: "safeguarded Newton",
            detail: format!("no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"),
        });
    }
    // Orient so that f(a) < 0 < f(b).
    let flip = fa > 0.0;
    let mut x = match seed {
        Some(s) if s > a && s < b => s,
        _ => 0.5 * (a + b),
    };
    let mut last_step = b - a;
    for _ in 0..200 {
        let (mut fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if flip {
            fx = -fx;
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let df = if flip { -dfx } else { dfx };
        let newton = x - fx / df;
        let step;
        if df != 0.0 && newton > a && newton < b && (fx / df).abs() < 0.5 * last_step.abs() {
            step = x - newton;
            x = newton;
        } else {
            let mid = 0.5 * (a + b);
            step = x - mid;
            x = mid;
        }
        last_step = step;
        if step.abs() <= x_tol * (1.0 + x.abs()) || b - a <= x_tol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        what: "safeguarded Newton",
        detail: format!("no convergence within 200 iterations, bracket [{a}, {b}]"),
    })
}

/// Plain bisection on a sign-change bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Convergence {
            what: "bisection",
            detail: format!("no sign change on [{lo}, {hi}]"),
        });
    }
    while (b - a).abs() > x_tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
