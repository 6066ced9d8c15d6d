//! Gamma function (Lanczos, g = 7, nine coefficients) and its logarithm.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_series(x: f64) -> f64 {
    // x is the argument shifted down by one.
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) for real `x` away from the poles at 0, -1, -2, ...
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("gamma", "argument is NaN"));
    }
    if is_pole(x) {
        return Err(domain("gamma", format!("pole at {x}")));
    }
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    if x == x.floor() && x <= 23.0 {
        // Exact factorials for small integers.
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    // Split the power to avoid premature overflow near the top of the range.
    let half = t.powf(0.5 * (y + 0.5));
    Ok((2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_series(y))
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("argument {x} must be positive and finite")));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok((PI / s).ln() - ln_gamma(1.0 - x)?);
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (y + 0.5) * t.ln() - t + lanczos_series(y).ln())
}

/// Checks the coefficient set against the reflection and duplication
/// identities at a handful of points, returning the worst relative defect.
pub fn gamma_self_check() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in &[0.1, 1.0 / 6.0, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9] {
        let refl = gamma_fn(x)? * gamma_fn(1.0 - x)? * (PI * x).sin() / PI;
        worst = worst.max((refl - 1.0).abs());
    }
    for &x in &[0.3, 5.0 / 6.0, 1.7, 4.25, 10.5] {
        // Γ(x)Γ(x+1/2) = 2^{1-2x} √π Γ(2x)
        let lhs = gamma_fn(x)? * gamma_fn(x + 0.5)?;
        let rhs = 2f64.powf(1.0 - 2.0 * x) * PI.sqrt() * gamma_fn(2.0 * x)?;
        worst = worst.max((lhs / rhs - 1.0).abs());
    }
    if worst > 1e-12 {
        return Err(Error::Convergence {
            what: "gamma self-check",
            detail: format!("identity defect {worst:e}"),
        });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Euler's infinite product Γ(x) = lim n! n^x / (x(x+1)...(x+n)),
    /// accelerated by evaluating at a shifted argument and using the Stirling
    /// series with many terms.
    fn stirling_oracle(x: f64) -> f64 {
        // Shift up by N with the recurrence, then Stirling with Bernoulli terms.
        let n = 30.0;
        let mut prod = 1.0;
        let mut z = x;
        while z < n {
            prod *= z;
            z += 1.0;
        }
        let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3))
            + 1.0 / (1260.0 * z.powi(5))
            - 1.0 / (1680.0 * z.powi(7));
        ln.exp() / prod
    }

    #[test]
    fn exact_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reflection_product_of_thirds() {
        let p = gamma_fn(1.0 / 3.0).unwrap() * gamma_fn(2.0 / 3.0).unwrap();
        assert!((p - 2.0 * PI / 3f64.sqrt()).abs() < 1e-13);
        assert!((p - 3.627_598_728_468_436).abs() < 1e-13);
    }

    #[test]
    fn five_sixths_against_oracle() {
        let g = gamma_fn(5.0 / 6.0).unwrap();
        assert!((g - stirling_oracle(5.0 / 6.0)).abs() < 1e-13);
        assert!((g - 1.128_787_029_908_126).abs() < 1e-13);
    }

    #[test]
    fn matches_oracle_across_range() {
        for i in 1..200 {
            let x = 0.05 * i as f64 + 0.013;
            let rel = (gamma_fn(x).unwrap() / stirling_oracle(x) - 1.0).abs();
            assert!(rel < 1e-12, "x = {x}: rel {rel:e}");
            let lrel = (ln_gamma(x).unwrap() - stirling_oracle(x).ln()).abs();
            assert!(lrel < 1e-12 * (1.0 + stirling_oracle(x).ln().abs()), "ln x = {x}");
        }
    }

    #[test]
    fn negative_noninteger_and_poles() {
        // Γ(-1/2) = -2√π
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn self_check_passes() {
        assert!(gamma_self_check().unwrap() < 1e-13);
    }
}
