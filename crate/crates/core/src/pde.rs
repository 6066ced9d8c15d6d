//! Finite-difference solution of ∂ₓφ = ½∂ₕ²φ − hφ on (0, x_max] × [0, h_max]
//! with φ(0, h) = u(h), ∂ₕφ(x, 0) = 0 and φ(x, h_max) = 0.
//!
//! Crank–Nicolson in x with the reaction term implicit. The initial datum has
//! u'(0) ≠ 0 against a homogeneous Neumann condition, so the solution behaves
//! like √x near the corner and plain Crank–Nicolson would propagate the
//! incompatibility as oscillations. The start is therefore damped in the
//! spirit of Rannacher: the first interval is covered by graded backward-Euler
//! substeps, the next few by uniform backward-Euler substeps.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::airy::NormalizedAiry;
use crate::error::{range, Error, Result};
use crate::spectrum::SpectralData;

/// Backward-Euler substeps inside the first x interval, and their grading power.
pub const FIRST_STEP_SUBSTEPS: usize = 64;
pub const FIRST_STEP_GRADING: i32 = 3;
/// Further intervals stepped by uniform backward-Euler substeps.
pub const STARTUP_INTERVALS: usize = 8;
pub const STARTUP_SUBSTEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    pub x_max: f64,
    pub h_max: f64,
    pub dx: f64,
    pub dh: f64,
}

impl Default for PdeGrid {
    fn default() -> Self {
        Self {
            x_max: 4.0,
            h_max: 8.0,
            dx: 0.002,
            dh: 0.01,
        }
    }
}

impl PdeGrid {
    pub fn validate(&self) -> Result<(usize, usize)> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.x_max) && ok(self.h_max) && ok(self.dx) && ok(self.dh)) {
            return Err(Error::Config(format!("grid parameters must be positive: {self:?}")));
        }
        let nx = (self.x_max / self.dx).round();
        let nh = (self.h_max / self.dh).round();
        if (nx * self.dx - self.x_max).abs() > 1e-9 * self.x_max || (nh * self.dh - self.h_max).abs() > 1e-9 * self.h_max {
            return Err(Error::Config("x_max/dx and h_max/dh must be integers".into()));
        }
        if nx < 4.0 || nh < 4.0 {
            return Err(Error::Config("grid needs at least 4 intervals per axis".into()));
        }
        if nx * nh > 5e8 {
            return Err(Error::Config("grid too large".into()));
        }
        // u(8) = 2.4e-10, so the default sits just inside this threshold.
        if NormalizedAiry::u(self.h_max)? > 1e-9 {
            return Err(Error::Config(format!("h_max = {} leaves u(h_max) too large", self.h_max)));
        }
        Ok((nx as usize, nh as usize))
    }
}

/// φ on a rectangular grid, stored row-major with one row per x node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeField {
    pub grid: PdeGrid,
    pub x_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub steps: usize,
    pub boundary: String,
}

impl PdeField {
    pub fn nx(&self) -> usize {
        self.x_grid.len()
    }

    pub fn nh(&self) -> usize {
        self.h_grid.len()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nh() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nh = self.nh();
        &self.values[i * nh..(i + 1) * nh]
    }

    /// Bilinear interpolation of φ; queries outside the grid are errors.
    pub fn phi(&self, x: f64, h: f64) -> Result<f64> {
        let g = &self.grid;
        if !(0.0..=g.x_max).contains(&x) || !(0.0..=g.h_max).contains(&h) {
            return Err(range("pde field", format!("({x}, {h}) outside the grid")));
        }
        let fx = x / g.dx;
        let fh = h / g.dh;
        let i = (fx.floor() as usize).min(self.nx() - 2);
        let j = (fh.floor() as usize).min(self.nh() - 2);
        let (tx, th) = (fx - i as f64, fh - j as f64);
        Ok((1.0 - tx) * ((1.0 - th) * self.at(i, j) + th * self.at(i, j + 1))
            + tx * ((1.0 - th) * self.at(i + 1, j) + th * self.at(i + 1, j + 1)))
    }

    /// ∫₀^∞ e^{−λx} φ(x, h_j) dx: trapezoid on the grid plus the tail beyond
    /// x_max, where φ decays like e^{−δ'₁x}.
    pub fn laplace_at(&self, j: usize, lambda: f64, delta1: f64) -> f64 {
        let dx = self.grid.dx;
        let n = self.nx();
        let mut s = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * (-lambda * self.x_grid[i]).exp() * self.at(i, j);
        }
        let tail = self.at(n - 1, j) * (-lambda * self.grid.x_max).exp() / (lambda + delta1);
        dx * s + tail
    }

    /// Writes the field as a CSV matrix: the header row holds the h grid, the
    /// first column the x grid.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "x\\h")?;
        for h in &self.h_grid {
            write!(out, ",{h:.16e}")?;
        }
        writeln!(out)?;
        for (i, x) in self.x_grid.iter().enumerate() {
            write!(out, "{x:.16e}")?;
            for v in self.row(i) {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm); `a` is the sub-,
/// `b` the main and `c` the super-diagonal.
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64], scratch: &mut [f64]) {
    let n = d.len();
    scratch[0] = c[0] / b[0];
    d[0] /= b[0];
    for i in 1..n {
        let m = b[i] - a[i] * scratch[i - 1];
        scratch[i] = c[i] / m;
        d[i] = (d[i] - a[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= scratch[i] * d[i + 1];
    }
}

/// One θ-scheme step of size `step` on the interior unknowns j = 0..nh−1
/// (the node at h_max is held at zero).
struct Stepper {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    scratch: Vec<f64>,
    rhs: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            a: vec![0.0; n],
            b: vec![0.0; n],
            c: vec![0.0; n],
            scratch: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    /// Applies `(I − θ·step·L)φ' = (I + (1−θ)·step·L)φ`.
    fn step(&mut self, phi: &mut [f64], h: &[f64], dh: f64, step: f64, theta: f64) {
        let n = self.rhs.len();
        let k = 0.5 / (dh * dh);
        // L φ_j = k(φ_{j+1} − 2φ_j + φ_{j−1}) − h_j φ_j, ghost φ_{−1} = φ_1.
        let apply = |phi: &[f64], j: usize| -> f64 {
            let left = if j == 0 { phi[1] } else { phi[j - 1] };
            let right = if j + 1 < n { phi[j + 1] } else { 0.0 };
            k * (right - 2.0 * phi[j] + left) - h[j] * phi[j]
        };
        let e = (1.0 - theta) * step;
        for j in 0..n {
            self.rhs[j] = phi[j] + if e > 0.0 { e * apply(phi, j) } else { 0.0 };
        }
        let t = theta * step;
        for j in 0..n {
            self.a[j] = -t * k;
            self.c[j] = -t * k;
            self.b[j] = 1.0 + t * (2.0 * k + h[j]);
        }
        self.c[0] = -2.0 * t * k;
        self.a[0] = 0.0;
        self.c[n - 1] = 0.0;
        thomas(&self.a, &self.b, &self.c, &mut self.rhs, &mut self.scratch);
        phi[..n].copy_from_slice(&self.rhs);
    }
}

/// Solves for φ on `grid`.
pub fn solve_phi(grid: PdeGrid) -> Result<PdeField> {
    let (nx, nh) = grid.validate()?;
    let x_grid: Vec<f64> = (0..=nx).map(|i| i as f64 * grid.dx).collect();
    let h_grid: Vec<f64> = (0..=nh).map(|j| j as f64 * grid.dh).collect();
    let width = nh + 1;
    let mut values = vec![0.0; (nx + 1) * width];
    let mut phi = vec![0.0; width];
    for (j, &h) in h_grid.iter().enumerate().take(nh) {
        phi[j] = NormalizedAiry::u(h)?;
    }
    values[..width].copy_from_slice(&phi);
    let mut stepper = Stepper::new(nh);
    for i in 1..=nx {
        if i == 1 {
            // The solution varies like √x at the corner; grade the substeps
            // of the first interval as (k/N)^GRADING.
            let mut prev = 0.0;
            for k in 1..=FIRST_STEP_SUBSTEPS {
                let t = grid.dx * (k as f64 / FIRST_STEP_SUBSTEPS as f64).powi(FIRST_STEP_GRADING);
                stepper.step(&mut phi[..nh], &h_grid, grid.dh, t - prev, 1.0);
                prev = t;
            }
        } else if i <= STARTUP_INTERVALS + 1 {
            for _ in 0..STARTUP_SUBSTEPS {
                stepper.step(&mut phi[..nh], &h_grid, grid.dh, grid.dx / STARTUP_SUBSTEPS as f64, 1.0);
            }
        } else {
            stepper.step(&mut phi[..nh], &h_grid, grid.dh, grid.dx, 0.5);
        }
        values[i * width..(i + 1) * width].copy_from_slice(&phi);
    }
    Ok(PdeField {
        grid,
        x_grid,
        h_grid,
        values,
        steps: nx,
        boundary: "neumann at h=0 (ghost node), dirichlet 0 at h_max; damped start".into(),
    })
}

/// Eigenfunction expansion φ(x, h) = Σₖ |u'(0)|/(2δ'ₖ²u(−δ'ₖ)) e^{−δ'ₖx} u(h − δ'ₖ).
///
/// Exact for x > 0; the terms decay like e^{−δ'ₖx}, so small x needs a long
/// spectrum. Errors if the last retained term is not below 1e-14.
pub fn phi_eigen(spectral: &SpectralData, x: f64, h: f64) -> Result<f64> {
    if !(x > 0.0 && h >= 0.0) {
        return Err(range("phi_eigen", format!("need x > 0 and h ≥ 0, got ({x}, {h})")));
    }
    let c = NormalizedAiry::u_prime_at_zero().abs() / 2.0;
    let mut s = 0.0;
    let mut last = f64::INFINITY;
    for &d in &spectral.delta_prime {
        last = c / (d * d * NormalizedAiry::u(-d)?) * (-d * x).exp() * NormalizedAiry::u(h - d)?;
        s += last;
    }
    if last.abs() > 1e-14 {
        return Err(range("phi_eigen", format!("expansion not converged at x = {x} (last term {last:e})")));
    }
    Ok(s)
}

/// ν̂(x, h) = u(h)·φ(x, h), bilinear in φ.
pub fn joint_nu_hat(field: &PdeField, x: f64, h: f64) -> Result<f64> {
    Ok(NormalizedAiry::u(h)? * field.phi(x, h)?)
}

/// Discrete residual of ∂ₓν̂ = ½∂ₕ(u²∂ₕ(u⁻²ν̂)) at the grid node nearest
/// (x, h), with ν̂ = uφ. Central differences in x, conservative in h.
pub fn nu_hat_pde_residual(field: &PdeField, x: f64, h: f64) -> Result<f64> {
    let g = &field.grid;
    let i = (x / g.dx).round() as isize;
    let j = (h / g.dh).round() as isize;
    if i < 1 || j < 1 || i as usize + 1 >= field.nx() || j as usize + 1 >= field.nh() {
        return Err(range("nu_hat_pde_residual", format!("({x}, {h}) is not an interior node")));
    }
    let (i, j) = (i as usize, j as usize);
    let hs = [field.h_grid[j - 1], field.h_grid[j], field.h_grid[j + 1]];
    let u = [NormalizedAiry::u(hs[0])?, NormalizedAiry::u(hs[1])?, NormalizedAiry::u(hs[2])?];
    let u_half = [
        NormalizedAiry::u(hs[0] + 0.5 * g.dh)?,
        NormalizedAiry::u(hs[1] + 0.5 * g.dh)?,
    ];
    // Time derivative of ν̂ at row i.
    let dnu = u[1] * (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * g.dx);
    // u⁻²ν̂ = φ/u, averaged over rows i±1 and i (Crank–Nicolson centering).
    let q = |jj: usize, k: usize| {
        (0.25 * field.at(i - 1, jj) + 0.5 * field.at(i, jj) + 0.25 * field.at(i + 1, jj)) / u[k]
    };
    let flux_lo = u_half[0] * u_half[0] * (q(j, 1) - q(j - 1, 0)) / g.dh;
    let flux_hi = u_half[1] * u_half[1] * (q(j + 1, 2) - q(j, 1)) / g.dh;
    let rhs = 0.5 * (flux_hi - flux_lo) / g.dh;
    Ok((dnu - rhs).abs())
}

/// Marginals of the PDE field: ĥ-marginal 2∫₀^∞ν̂ dx and x-marginal ∫₀^∞ν̂ dh.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdeMarginals {
    /// 2∫₀^∞ ν̂(x, h_j) dx per h node.
    pub height: Vec<f64>,
    /// ∫₀^{h_max} ν̂(x_i, h) dh per x node.
    pub position: Vec<f64>,
    /// 2∬ ν̂.
    pub total_mass: f64,
}

/// Trapezoid marginals; the x-integral adds the tail ν̂(x_max, h)/δ'₁.
pub fn pde_marginals(field: &PdeField, delta1: f64) -> Result<PdeMarginals> {
    let g = &field.grid;
    let u: Vec<f64> = field.h_grid.iter().map(|&h| NormalizedAiry::u(h)).collect::<Result<_>>()?;
    let (nx, nh) = (field.nx(), field.nh());
    let mut height = vec![0.0; nh];
    for (j, hj) in height.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..nx {
            let w = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
            s += w * field.at(i, j);
        }
        *hj = 2.0 * u[j] * (g.dx * s + field.at(nx - 1, j) / delta1);
    }
    let position: Vec<f64> = (0..nx)
        .map(|i| {
            let row = field.row(i);
            let mut s = 0.0;
            for j in 0..nh {
                let w = if j == 0 || j == nh - 1 { 0.5 } else { 1.0 };
                s += w * u[j] * row[j];
            }
            g.dh * s
        })
        .collect();
    let total_mass = {
        let mut s = 0.0;
        for (j, v) in height.iter().enumerate() {
            let w = if j == 0 || j == nh - 1 { 0.5 } else { 1.0 };
            s += w * v;
        }
        g.dh * s
    };
    Ok(PdeMarginals {
        height,
        position,
        total_mass,
    })
}
