//! Real Airy functions and the normalized Airy function
//! `u(h) = Ai(2^{1/3} h) / Ai(0)`, the bounded solution of `u'' = 2hu` with
//! `u(0) = 1`.
//!
//! Evaluation regimes for Ai, Ai', Bi, Bi' at real `z`:
//!
//! | range            | method                                                    |
//! |------------------|-----------------------------------------------------------|
//! | `|z| ≤ 2`        | Maclaurin series                                          |
//! | `z > 2`          | Ai, Ai' from `K_{1/3}`, `K_{2/3}` by trapezoidal rule; Bi, Bi' from the (positive-term) Maclaurin series up to 12, asymptotic expansion beyond |
//! | `-9 ≤ z < -2`    | Taylor stepping of the Airy equation from `z = -2`         |
//! | `z < -9`         | oscillatory asymptotic expansions                          |
//!
//! On the positive axis values are carried with the exponential factor
//! `e^{∓ζ}`, `ζ = (2/3) z^{3/2}`, split off and only recombined when the
//! result is representable.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_finite, Result};

/// Ai(0) = 3^{-2/3} / Γ(2/3).
pub const AI0: f64 = 0.355_028_053_887_817_239_260;
/// Ai'(0) = -3^{-1/3} / Γ(1/3).
pub const AIP0: f64 = -0.258_819_403_792_806_798_405;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const CBRT2: f64 = 1.259_921_049_894_873_2;

const MACLAURIN_LIMIT: f64 = 2.0;
const BI_SERIES_LIMIT: f64 = 12.0;
const TAYLOR_LIMIT: f64 = -9.0;

/// Ai, Ai', Bi, Bi' at a real argument.
///
/// When `scaled` is set, `ai`/`ai_prime` carry a factor `e^{ζ}` and
/// `bi`/`bi_prime` a factor `e^{-ζ}` (`ζ = (2/3) z^{3/2}`), because the
/// unscaled values would underflow or overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryValues {
    pub z: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
    pub scaled: bool,
}

impl AiryValues {
    /// `Ai·Bi' − Ai'·Bi`, which equals 1/π; invariant under the scaling.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// Values with the positive-axis exponential factors split off.
#[derive(Debug, Clone, Copy)]
struct Split {
    ai: f64,
    aip: f64,
    bi: f64,
    bip: f64,
    /// ζ for z > 2, else 0.
    zeta: f64,
}

/// Evaluates Ai, Ai', Bi, Bi' at `z`.
pub fn airy_pair(z: f64) -> Result<AiryValues> {
    require_finite("airy_pair", z)?;
    let s = split(z);
    if s.zeta == 0.0 {
        return Ok(AiryValues {
            z,
            ai: s.ai,
            ai_prime: s.aip,
            bi: s.bi,
            bi_prime: s.bip,
            scaled: false,
        });
    }
    let scaled = s.zeta > 700.0;
    let (down, up) = if scaled { (1.0, 1.0) } else { ((-s.zeta).exp(), s.zeta.exp()) };
    Ok(AiryValues {
        z,
        ai: s.ai * down,
        ai_prime: s.aip * down,
        bi: s.bi * up,
        bi_prime: s.bip * up,
        scaled,
    })
}

fn split(z: f64) -> Split {
    if z.abs() <= MACLAURIN_LIMIT {
        let (ai, aip, bi, bip) = maclaurin(z);
        return Split {
            ai,
            aip,
            bi,
            bip,
            zeta: 0.0,
        };
    }
    if z > 0.0 {
        let zeta = 2.0 / 3.0 * z * z.sqrt();
        let k13 = scaled_bessel_k(1.0 / 3.0, zeta);
        let k23 = scaled_bessel_k(2.0 / 3.0, zeta);
        let ai = (z / 3.0).sqrt() * k13 / PI;
        let aip = -z / (PI * SQRT3) * k23;
        let (bi, bip) = if z <= BI_SERIES_LIMIT {
            let (_, _, bi, bip) = maclaurin(z);
            let down = (-zeta).exp();
            (bi * down, bip * down)
        } else {
            bi_asymptotic(z, zeta)
        };
        return Split { ai, aip, bi, bip, zeta };
    }
    let (ai, aip, bi, bip) = if z >= TAYLOR_LIMIT {
        taylor_from_minus_two(z)
    } else {
        oscillatory_asymptotic(-z)
    };
    Split {
        ai,
        aip,
        bi,
        bip,
        zeta: 0.0,
    }
}

/// Maclaurin series: Ai = c₁f − c₂g, Bi = √3(c₁f + c₂g).
fn maclaurin(z: f64) -> (f64, f64, f64, f64) {
    let c1 = AI0;
    let c2 = -AIP0;
    let z3 = z * z * z;
    let (mut f, mut fp, mut g, mut gp) = (1.0, 0.0, z, 1.0);
    let (mut tf, mut tfp, mut tg, mut tgp) = (1.0, z * z / 2.0, z, 1.0);
    fp += tfp;
    for k in 1..200 {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp *= z3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        if k > 1 {
            tfp *= z3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp += tfp;
        }
        f += tf;
        g += tg;
        gp += tgp;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if tf.abs() + tg.abs() + tfp.abs() + tgp.abs() < 1e-17 * scale {
            break;
        }
    }
    (
        c1 * f - c2 * g,
        c1 * fp - c2 * gp,
        SQRT3 * (c1 * f + c2 * g),
        SQRT3 * (c1 * fp + c2 * gp),
    )
}

/// e^{x} K_ν(x) = ∫₀^∞ e^{-x(cosh t − 1)} cosh(νt) dt by the trapezoidal rule,
/// which converges geometrically for this analytic, rapidly decaying integrand.
fn scaled_bessel_k(nu: f64, x: f64) -> f64 {
    // The integrand is Gaussian-like of width ~x^{-1/2}; keep several nodes per width.
    let h = 0.1_f64.min(0.45 / x.sqrt());
    let mut sum = 0.5;
    for j in 1..20_000 {
        let t = h * j as f64;
        let s = (0.5 * t).sinh();
        let term = (-2.0 * x * s * s).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    h * sum
}

/// Coefficients u_k of the Airy asymptotic expansions, and v_k = −(6k+1)/(6k−1) u_k.
fn asymptotic_coefficients(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    for k in 1..n {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    (u, v)
}

/// Bi, Bi' for large positive z, carrying the factor e^{-ζ}.
fn bi_asymptotic(z: f64, zeta: f64) -> (f64, f64) {
    let (u, v) = asymptotic_coefficients(40);
    let (mut su, mut sv) = (0.0, 0.0);
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..u.len() {
        let tu = u[k] * pow;
        let tv = v[k] * pow;
        if tu.abs() > last {
            break;
        }
        su += tu;
        sv += tv;
        last = tu.abs();
        if last < 1e-17 {
            break;
        }
        pow /= zeta;
    }
    let q = z.powf(0.25);
    (su / (PI.sqrt() * q), q * sv / PI.sqrt())
}

/// Ai(−x), Ai'(−x), Bi(−x), Bi'(−x) for large positive x.
fn oscillatory_asymptotic(x: f64) -> (f64, f64, f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = asymptotic_coefficients(60);
    // Even/odd partial sums with alternating signs.
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..u.len() {
        let tu = u[k] * pow;
        let tv = v[k] * pow;
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += sign * tu;
            ve += sign * tv;
        } else {
            uo += sign * tu;
            vo += sign * tv;
        }
        last = mag;
        if mag < 1e-17 {
            break;
        }
        pow /= zeta;
    }
    let (s, c) = (zeta - PI / 4.0).sin_cos();
    let q = x.powf(0.25);
    let rp = PI.sqrt();
    let ai = (c * ue + s * uo) / (rp * q);
    let aip = q * (s * ve - c * vo) / rp;
    let bi = (-s * ue + c * uo) / (rp * q);
    let bip = q * (c * ve + s * vo) / rp;
    (ai, aip, bi, bip)
}

/// Advances a solution of y'' = z y from `z0` to `z0 + dz` by its Taylor series.
fn taylor_step(z0: f64, y: f64, yp: f64, dz: f64) -> (f64, f64) {
    // a_{n+2} = (z0 a_n + a_{n-1}) / ((n+2)(n+1))
    let (mut a_prev, mut a0, mut a1) = (0.0, y, yp);
    let mut val = y + yp * dz;
    let mut der = yp;
    let mut pow = dz; // dz^{n+1} for the term a_{n+2}
    for n in 0..200 {
        let nf = n as f64;
        let a2 = (z0 * a0 + a_prev) / ((nf + 2.0) * (nf + 1.0));
        // a_{n+2} dz^{n+2}, derivative term (n+2) a_{n+2} dz^{n+1}
        let tv = a2 * pow * dz;
        let td = (nf + 2.0) * a2 * pow;
        val += tv;
        der += td;
        if n > 4 && tv.abs() < 1e-18 * val.abs().max(1e-300) && td.abs() < 1e-18 * der.abs().max(1e-300) {
            break;
        }
        a_prev = a0;
        a0 = a1;
        a1 = a2;
        pow *= dz;
    }
    (val, der)
}

fn taylor_from_minus_two(z: f64) -> (f64, f64, f64, f64) {
    let start = -MACLAURIN_LIMIT;
    let (mut ai, mut aip, mut bi, mut bip) = maclaurin(start);
    let steps = ((start - z) / 0.5).ceil().max(1.0) as usize;
    let dz = (z - start) / steps as f64;
    let mut at = start;
    for _ in 0..steps {
        (ai, aip) = taylor_step(at, ai, aip, dz);
        (bi, bip) = taylor_step(at, bi, bip, dz);
        at += dz;
    }
    (ai, aip, bi, bip)
}

/// The normalized Airy function u(h) = Ai(2^{1/3}h)/Ai(0) and its derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedAiry;

impl NormalizedAiry {
    /// 2^{1/3}, the argument scale between u and Ai.
    pub const SCALE: f64 = CBRT2;

    pub fn u(h: f64) -> Result<f64> {
        require_finite("u", h)?;
        if h == 0.0 {
            return Ok(1.0);
        }
        let s = split(CBRT2 * h);
        Ok(s.ai * (-s.zeta).exp() / AI0)
    }

    pub fn u_prime(h: f64) -> Result<f64> {
        require_finite("u_prime", h)?;
        let s = split(CBRT2 * h);
        Ok(CBRT2 * s.aip * (-s.zeta).exp() / AI0)
    }

    /// (u(h), u'(h)) from a single Airy evaluation.
    pub fn u_and_prime(h: f64) -> Result<(f64, f64)> {
        require_finite("u", h)?;
        let s = split(CBRT2 * h);
        let down = (-s.zeta).exp();
        let u = if h == 0.0 { 1.0 } else { s.ai * down / AI0 };
        Ok((u, CBRT2 * s.aip * down / AI0))
    }

    /// u''(h) = 2h·u(h).
    pub fn u_second(h: f64) -> Result<f64> {
        Ok(2.0 * h * Self::u(h)?)
    }

    /// u'(0) = −6^{1/3}Γ(2/3)/Γ(1/3) = 2^{1/3} Ai'(0)/Ai(0).
    pub fn u_prime_at_zero() -> f64 {
        CBRT2 * AIP0 / AI0
    }
}

/// Free-function forms.
pub fn u(h: f64) -> Result<f64> {
    NormalizedAiry::u(h)
}

pub fn u_prime(h: f64) -> Result<f64> {
    NormalizedAiry::u_prime(h)
}

/// Solution v_λ of the Airy equation f'' = 2tf with v_λ(λ) = u(λ) and
/// v'_λ(λ) = −u'(λ), stored in the basis Ai(2^{1/3}t), Bi(2^{1/3}t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompanionSolution {
    pub lambda: f64,
    pub c_ai: f64,
    pub c_bi: f64,
}

impl CompanionSolution {
    pub fn new(lambda: f64) -> Result<Self> {
        require_finite("companion", lambda)?;
        if lambda <= 0.0 {
            return Err(domain("companion", format!("lambda = {lambda} must be positive")));
        }
        let (u, up) = NormalizedAiry::u_and_prime(lambda)?;
        let a = airy_pair(CBRT2 * lambda)?;
        let (y1, y1p, y2, y2p) = (a.ai, CBRT2 * a.ai_prime, a.bi, CBRT2 * a.bi_prime);
        let w = CBRT2 / PI;
        let target_p = -up;
        let c_ai = (u * y2p - target_p * y2) / w;
        let c_bi = (y1 * target_p - y1p * u) / w;
        Ok(Self { lambda, c_ai, c_bi })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let a = airy_pair(CBRT2 * t)?;
        Ok(self.c_ai * a.ai + self.c_bi * a.bi)
    }

    pub fn eval_prime(&self, t: f64) -> Result<f64> {
        let a = airy_pair(CBRT2 * t)?;
        Ok(CBRT2 * (self.c_ai * a.ai_prime + self.c_bi * a.bi_prime))
    }

    /// u·v' − u'·v at `t`; constant, equal to −2u(λ)u'(λ).
    pub fn wronskian_with_u(&self, t: f64) -> Result<f64> {
        let (u, up) = NormalizedAiry::u_and_prime(t)?;
        Ok(u * self.eval_prime(t)? - up * self.eval(t)?)
    }
}

pub fn companion(lambda: f64) -> Result<CompanionSolution> {
    CompanionSolution::new(lambda)
}

pub fn v_lambda_eval(sol: &CompanionSolution, t: f64) -> Result<f64> {
    sol.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    /// Brute-force Maclaurin summation with a fixed 200 terms, written
    /// independently of the production recurrences.
    fn brute_force_ai(z: f64) -> f64 {
        let mut f = 0.0;
        let mut g = 0.0;
        for k in 0..200u32 {
            // 3^k (1/3)_k / (3k)! and 3^k (2/3)_k / (3k+1)!
            let mut cf = 1.0;
            let mut cg = 1.0;
            for j in 0..k {
                let jf = j as f64;
                cf *= 3.0 * (jf + 1.0 / 3.0);
                cg *= 3.0 * (jf + 2.0 / 3.0);
            }
            let mut fact3k = 1.0;
            for i in 1..=(3 * k) {
                fact3k *= i as f64;
            }
            if !fact3k.is_finite() {
                break;
            }
            f += cf * z.powi(3 * k as i32) / fact3k;
            g += cg * z.powi(3 * k as i32 + 1) / (fact3k * (3 * k + 1) as f64);
        }
        AI0 * f + AIP0 * g
    }

    #[test]
    fn values_at_zero() {
        let a = airy_pair(0.0).unwrap();
        assert!((a.ai - 0.355_028_053_9).abs() < 1e-10);
        assert!((a.ai_prime + 0.258_819_403_8).abs() < 1e-10);
        assert!((a.wronskian() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn decaying_branch_at_five() {
        let a = airy_pair(5.0).unwrap();
        assert!((a.ai / brute_force_ai(5.0) - 1.0).abs() < 1e-6);
        assert!((a.ai - 1.0834e-4).abs() < 1e-8);
    }

    #[test]
    fn frozen_high_precision_table() {
        // (z, Ai, Ai', Bi, Bi') from an independent 40-digit evaluation.
        let table = [
            (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_2, 1.207_423_594_952_871_3, 0.932_435_933_392_775_6),
            (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63, 3.298_094_999_978_214_7, 4.100_682_049_932_889_9),
            (3.7, 0.001_745_572_000_609_978_5, -0.003_466_940_749_027_627, 47.560_747_499_589_46, 87.890_727_262_833_44),
            (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_624_8e-4, 657.792_044_171_171_2, 1_435.819_080_217_982_5),
            (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10, 455_641_153.548_225_1, 1_429_236_134.482_865_8),
            (15.0, 2.164_962_520_737_992_3e-18, -8.420_567_954_017_772_8e-18, 1.898_209_956_749_359e16, 7.319_749_203_407_01e16),
            (-1.0, 0.535_560_883_292_352_1, -0.010_160_567_116_645_209, 0.103_997_389_496_944_61, 0.592_375_626_422_792_4),
            (-3.0, -0.378_814_293_677_658_1, 0.314_583_769_216_598_8, -0.198_289_626_374_926_54, -0.675_611_222_685_258_5),
            (-5.0, 0.350_761_009_024_114_3, 0.327_192_818_554_443_14, -0.138_369_134_901_600_58, 0.778_411_773_001_899_2),
            (-8.0, -0.052_705_050_356_386_2, 0.935_560_938_198_306_6, -0.331_251_580_751_137_86, -0.159_450_497_812_981_4),
            (-10.0, 0.040_241_238_486_443_19, 0.996_265_044_132_790_1, -0.314_679_829_643_838_63, 0.119_414_113_399_909_24),
            (-12.5, -0.276_274_561_381_160_25, -0.419_331_330_419_505_16, 0.117_033_367_257_392_78, -0.974_516_536_167_174_1),
        ];
        for (z, ai, aip, bi, bip) in table {
            let a = airy_pair(z).unwrap();
            // Relative to the local envelope on the oscillatory side.
            let env = if z < 0.0 { (-z).powf(0.25) } else { 1.0 };
            let chk = |got: f64, want: f64, scale: f64, name: &str| {
                let err = if z > 0.0 { (got / want - 1.0).abs() } else { (got - want).abs() / scale };
                assert!(err < 1e-10, "{name}({z}) = {got:e}, want {want:e}, err {err:e}");
            };
            chk(a.ai, ai, 1.0 / env, "Ai");
            chk(a.ai_prime, aip, env, "Ai'");
            chk(a.bi, bi, 1.0 / env, "Bi");
            chk(a.bi_prime, bip, env, "Bi'");
        }
    }

    #[test]
    fn wronskian_everywhere() {
        for i in -300..=300 {
            let z = 0.05 * i as f64 + 0.0071;
            let a = airy_pair(z).unwrap();
            assert!((a.wronskian() * PI - 1.0).abs() < 1e-11, "z = {z}: {}", a.wronskian() * PI);
        }
    }

    #[test]
    fn regime_seams_are_continuous() {
        for &z in &[MACLAURIN_LIMIT, -MACLAURIN_LIMIT, TAYLOR_LIMIT, BI_SERIES_LIMIT] {
            let lo = airy_pair(z - 1e-9).unwrap();
            let hi = airy_pair(z + 1e-9).unwrap();
            for (p, q) in [(lo.ai, hi.ai), (lo.ai_prime, hi.ai_prime), (lo.bi, hi.bi), (lo.bi_prime, hi.bi_prime)] {
                assert!((p - q).abs() < 1e-7 * (1.0 + q.abs()), "seam {z}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn nonpositive_sign_pattern_on_positive_axis() {
        for i in 0..100 {
            let z = 0.2 * i as f64;
            let a = airy_pair(z).unwrap();
            assert!(a.ai > 0.0 && a.ai_prime < 0.0 && a.bi > 0.0, "z = {z}");
        }
    }

    #[test]
    fn huge_argument_is_scaled() {
        let a = airy_pair(200.0).unwrap();
        assert!(a.scaled);
        assert!(a.ai.is_finite() && a.bi.is_finite() && a.ai > 0.0);
        assert!((a.wronskian() * PI - 1.0).abs() < 1e-12);
        assert!(airy_pair(f64::NAN).is_err());
    }

    #[test]
    fn normalized_airy_basics() {
        assert_eq!(u(0.0).unwrap(), 1.0);
        let up0 = NormalizedAiry::u_prime_at_zero();
        assert!((up0 + 0.918_496_472_007_921_2).abs() < 1e-14);
        assert!((u_prime(0.0).unwrap() - up0).abs() < 1e-15);
        let table = [
            (0.5, 0.573_142_080_344_841_6, -0.741_649_898_214_363_2),
            (1.0, 0.277_149_323_513_830_7, -0.444_499_766_934_263_1),
            (2.0, 0.042_849_361_429_973_53, -0.090_425_218_593_423_24),
            (-2.0, -0.354_161_567_718_517_6, 2.388_067_238_140_562_4),
            (-4.5, -0.355_836_530_706_337_4, 2.880_645_923_185_253_7),
        ];
        for (h, uv, upv) in table {
            assert!(close(u(h).unwrap(), uv, 1e-11), "u({h})");
            assert!(close(u_prime(h).unwrap(), upv, 1e-11), "u'({h})");
        }
    }

    #[test]
    fn asymptotic_prefactor_at_eight() {
        let h: f64 = 8.0;
        let scaled = u(h).unwrap() * h.powf(0.25) * (2f64.powf(1.5) / 3.0 * h.powf(1.5)).exp();
        let prefactor = 3f64.powf(2.0 / 3.0) * 1.354_117_939_426_400_4 / (2f64.powf(13.0 / 12.0) * PI.sqrt());
        assert!((prefactor - 0.749_974_614_064_692_8).abs() < 1e-12);
        // The leading term is approached from below at rate O(h^{-3/2}).
        assert!((scaled - 0.7500).abs() < 0.005, "{scaled}");
        assert!((scaled - 0.74759).abs() < 1e-4);
        assert!(close(u(h).unwrap(), 2.415_144_108_074_354_2e-10, 1e-9));
    }

    #[test]
    fn companion_conditions_and_wronskian() {
        for &lambda in &[0.5, 1.0, 2.0, 4.0] {
            let v = companion(lambda).unwrap();
            let (uu, up) = NormalizedAiry::u_and_prime(lambda).unwrap();
            assert!(close(v.eval(lambda).unwrap(), uu, 1e-12));
            assert!(close(v.eval_prime(lambda).unwrap(), -up, 1e-12));
            let target = -2.0 * uu * up;
            for j in 0..20 {
                let t = lambda + 0.15 * j as f64;
                let w = v.wronskian_with_u(t).unwrap();
                assert!((w - target).abs() < 1e-10 * (1.0 + target.abs()), "λ={lambda} t={t}: {w} vs {target}");
            }
        }
        assert!(companion(0.0).is_err());
        assert!(companion(-1.0).is_err());
    }

    #[test]
    fn companion_against_runge_kutta() {
        // Independent RK4 integration of f'' = 2tf from t = 1.
        let (u1, up1) = NormalizedAiry::u_and_prime(1.0).unwrap();
        let (mut t, mut f, mut fp) = (1.0_f64, u1, -up1);
        let n = 20_000;
        let dt = 1.0 / n as f64;
        for _ in 0..n {
            let acc = |t: f64, f: f64| 2.0 * t * f;
            let (k1f, k1p) = (fp, acc(t, f));
            let (k2f, k2p) = (fp + 0.5 * dt * k1p, acc(t + 0.5 * dt, f + 0.5 * dt * k1f));
            let (k3f, k3p) = (fp + 0.5 * dt * k2p, acc(t + 0.5 * dt, f + 0.5 * dt * k2f));
            let (k4f, k4p) = (fp + dt * k3p, acc(t + dt, f + dt * k3f));
            f += dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
            fp += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            t += dt;
        }
        let v = companion(1.0).unwrap();
        assert!(close(v_lambda_eval(&v, 2.0).unwrap(), f, 1e-11), "{} vs {f}", v.eval(2.0).unwrap());
    }
}
