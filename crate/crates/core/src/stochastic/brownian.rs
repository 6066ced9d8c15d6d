//! Brownian area functionals behind u, φ, w and ν̂.
//!
//! For a Brownian motion B with B(0) = h₀ ≥ 0 and an independent backward
//! copy B′ from the same level:
//!
//! * S = ∫₀^{ω′}|B′|, where ω′ is the first zero of B′;
//! * T¹ₓ = ∫₀ˣ|B|, and T²ₓ = ∫ₓ^{ωₓ}|B|, where ωₓ is the first zero after x.
//!
//! Then u(h) = E[e^{−S}], φ(x, h) = E[e^{−T¹ₓ−T²ₓ}], w(x) = φ(x, 0) and
//! ν̂(x, h) = E[e^{−S−T¹ₓ−T²ₓ}] = u(h)φ(x, h).
//!
//! Paths are Euler-discretized. Between two grid values a, b of equal sign a
//! zero crossing is still declared with the Brownian-bridge probability
//! e^{−2ab/dt}. Areas use the trapezoid rule, cut at the crossing. Once an
//! accumulated area exceeds `area_cap` the remaining exponential weight is
//! below e^{−area_cap}; the path stops and open functionals are recorded
//! as +∞.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::{stream_rng, Execution};

/// Stream domain used for Brownian paths.
pub const BROWNIAN_DOMAIN: u64 = 0x4252_4f57;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub dt: f64,
    /// Areas beyond this carry weight ≤ e^{−area_cap}.
    pub area_cap: f64,
    /// Hard cap on Euler steps per leg.
    pub max_steps: u64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            area_cap: 20.0,
            max_steps: 200_000_000,
        }
    }
}

impl PathConfig {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.area_cap > 0.0) {
            return Err(Error::Config("area_cap must be positive".into()));
        }
        Ok(())
    }
}

/// One path's area decomposition on an x grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFunctionalSample {
    pub h0: f64,
    /// Backward area S (+∞ if cut at the area cap).
    pub s: f64,
    pub x_grid: Vec<f64>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub rng_seed: u64,
}

impl PathFunctionalSample {
    /// Tₓ = S + T¹ₓ + T²ₓ at grid index k.
    pub fn total(&self, k: usize) -> f64 {
        self.s + self.t1[k] + self.t2[k]
    }
}

/// One Euler step from `a`.
struct Step {
    b: f64,
    /// Area up to the first zero inside the step (whole step if none).
    to_zero: f64,
    /// Area over the whole step.
    area: f64,
    crossed: bool,
}

#[inline]
fn euler_step<R: Rng + ?Sized>(rng: &mut R, a: f64, dt: f64, sqrt_dt: f64) -> Step {
    let z: f64 = rng.sample(StandardNormal);
    let b = a + sqrt_dt * z;
    let (aa, ab) = (a.abs(), b.abs());
    if a * b <= 0.0 {
        // Linear interpolation to the zero: two triangles.
        let frac = if aa + ab > 0.0 { aa / (aa + ab) } else { 0.0 };
        let to_zero = 0.5 * aa * frac * dt;
        return Step {
            b,
            to_zero,
            area: to_zero + 0.5 * ab * (1.0 - frac) * dt,
            crossed: true,
        };
    }
    let area = 0.5 * (aa + ab) * dt;
    let exponent = 2.0 * a * b / dt;
    if exponent < 40.0 && rng.gen::<f64>() < (-exponent).exp() {
        // Bridge excursion to zero inside the step, placed at mid-step.
        return Step {
            b,
            to_zero: 0.25 * aa * dt,
            area,
            crossed: true,
        };
    }
    Step {
        b,
        to_zero: area,
        area,
        crossed: false,
    }
}

/// Backward leg: area until the first zero from `h0`.
fn backward_area<R: Rng + ?Sized>(rng: &mut R, h0: f64, cfg: &PathConfig) -> Result<f64> {
    if h0 == 0.0 {
        return Ok(0.0);
    }
    let sqrt_dt = cfg.dt.sqrt();
    let mut b = h0;
    let mut area = 0.0;
    for _ in 0..cfg.max_steps {
        let st = euler_step(rng, b, cfg.dt, sqrt_dt);
        if st.crossed {
            return Ok(area + st.to_zero);
        }
        area += st.area;
        if area > cfg.area_cap {
            return Ok(f64::INFINITY);
        }
        b = st.b;
    }
    Err(Error::Sampling(format!("no zero within {} steps from h = {h0}", cfg.max_steps)))
}

/// Samples S, T¹ and T² from level `h0` on `x_grid` (increasing, ≥ 0).
pub fn sample_path_functional<R: Rng + ?Sized>(
    h0: f64,
    x_grid: &[f64],
    cfg: &PathConfig,
    rng: &mut R,
    rng_seed: u64,
) -> Result<PathFunctionalSample> {
    cfg.validate()?;
    if !(h0 >= 0.0 && h0.is_finite()) {
        return Err(domain("sample_path_functional", format!("h0 = {h0} must be ≥ 0")));
    }
    if x_grid.windows(2).any(|w| w[1] <= w[0]) || x_grid.first().is_some_and(|&x| x < 0.0) {
        return Err(domain("sample_path_functional", "x grid must be increasing and nonnegative"));
    }
    let s = backward_area(rng, h0, cfg)?;
    let m = x_grid.len();
    let mut t1 = vec![0.0; m];
    let mut t2 = vec![f64::INFINITY; m];
    if m > 0 {
        forward_leg(rng, h0, x_grid, cfg, &mut t1, &mut t2)?;
    }
    Ok(PathFunctionalSample {
        h0,
        s,
        x_grid: x_grid.to_vec(),
        t1,
        t2,
        rng_seed,
    })
}

fn forward_leg<R: Rng + ?Sized>(
    rng: &mut R,
    h0: f64,
    x_grid: &[f64],
    cfg: &PathConfig,
    t1: &mut [f64],
    t2: &mut [f64],
) -> Result<()> {
    let sqrt_dt = cfg.dt.sqrt();
    let marks: Vec<u64> = x_grid.iter().map(|&x| (x / cfg.dt).round() as u64).collect();
    let m = marks.len();
    let mut next_mark = 0;
    // Grid points first_open..next_mark have T¹ but still await their zero.
    let mut first_open = 0;
    let mut b = h0;
    let mut area = 0.0;
    let mut step: u64 = 0;
    loop {
        while next_mark < m && marks[next_mark] == step {
            t1[next_mark] = area;
            if b == 0.0 {
                t2[next_mark] = 0.0;
                first_open = next_mark + 1;
            }
            next_mark += 1;
        }
        if first_open == m {
            return Ok(());
        }
        if area > cfg.area_cap {
            // Every open or future functional is at least `area`: weight
            // below e^{-area_cap}. T² stays +∞.
            for v in &mut t1[next_mark..] {
                *v = f64::INFINITY;
            }
            return Ok(());
        }
        if step >= cfg.max_steps {
            return Err(Error::Sampling(format!("forward leg exceeded {} steps", cfg.max_steps)));
        }
        let st = euler_step(rng, b, cfg.dt, sqrt_dt);
        if st.crossed {
            let at_zero = area + st.to_zero;
            for k in first_open..next_mark {
                t2[k] = at_zero - t1[k];
            }
            first_open = next_mark;
        }
        area += st.area;
        b = st.b;
        step += 1;
    }
}

/// Quantities estimable from path functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum McTarget {
    U { h: f64 },
    Phi { x: f64, h: f64 },
    W { x: f64 },
    NuHat { x: f64, h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub path: PathConfig,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            path: PathConfig::default(),
            seed: 42,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub target: McTarget,
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

/// Independent paths from `h0` on a shared grid; path i uses stream i of
/// the master seed, so the ensemble does not depend on the worker count.
pub fn sample_ensemble(h0: f64, x_grid: &[f64], cfg: &McConfig) -> Result<Vec<PathFunctionalSample>> {
    if cfg.n_paths == 0 {
        return Err(Error::Config("n_paths must be positive".into()));
    }
    let domain_tag = BROWNIAN_DOMAIN ^ h0.to_bits();
    cfg.execution.try_map_indexed(cfg.n_paths, |i| {
        let seed = crate::exec::stream_seed(cfg.seed, domain_tag, i as u64);
        let mut rng = stream_rng(cfg.seed, domain_tag, i as u64);
        sample_path_functional(h0, x_grid, &cfg.path, &mut rng, seed)
    })
}

/// Mean and standard error of per-path values.
pub fn mean_and_se(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Statistics("need at least two samples".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, (var / n as f64).sqrt()))
}

/// Per-path weights of a target from an ensemble sampled at level h and
/// grid `x_grid` (`grid_index` selects x).
pub fn target_weights(samples: &[PathFunctionalSample], target: McTarget, grid_index: Option<usize>) -> Result<Vec<f64>> {
    let need = |k: Option<usize>| k.ok_or_else(|| Error::Config("target needs a grid index".into()));
    Ok(match target {
        McTarget::U { .. } => samples.iter().map(|p| (-p.s).exp()).collect(),
        McTarget::Phi { .. } | McTarget::W { .. } => {
            let k = need(grid_index)?;
            samples.iter().map(|p| (-(p.t1[k] + p.t2[k])).exp()).collect()
        }
        McTarget::NuHat { .. } => {
            let k = need(grid_index)?;
            samples.iter().map(|p| (-p.total(k)).exp()).collect()
        }
    })
}

/// Plain Monte Carlo estimate of one target.
pub fn mc_estimate(target: McTarget, cfg: &McConfig) -> Result<McEstimate> {
    let (h, grid): (f64, Vec<f64>) = match target {
        McTarget::U { h } => (h, vec![]),
        McTarget::Phi { x, h } | McTarget::NuHat { x, h } => (h, vec![x]),
        McTarget::W { x } => (0.0, vec![x]),
    };
    let samples = sample_ensemble(h, &grid, cfg)?;
    let idx = if grid.is_empty() { None } else { Some(0) };
    let (estimate, std_error) = mean_and_se(&target_weights(&samples, target, idx)?)?;
    Ok(McEstimate {
        target,
        estimate,
        std_error,
        n_paths: cfg.n_paths,
    })
}
