//! True self-avoiding walk with bond repulsion on ℤ.
//!
//! At site j let ℓ₋, ℓ₊ be the crossing counts of the bonds (j−1, j) and
//! (j, j+1) and δ = ℓ₋ − ℓ₊. The walk steps right with probability
//! w(δ)/(w(δ) + w(−δ)) = 1/(1 + e^{−2βδ}) for w(z) = e^{βz}, i.e. it is
//! pushed away from the more-crossed bond. The site local time is the mean
//! of the two adjacent bond counts.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{stream_rng, Execution};

/// Stream domain of walk streams.
pub const TSAW_DOMAIN: u64 = 0x5453_4157;
/// |δ| beyond which the step law is taken as deterministic (e^{−2β·64}).
const DELTA_CLAMP: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    /// Stop after exactly `n_steps`.
    FixedTime,
    /// Stop after a geometric number of steps with mean `n_steps`.
    GeometricTime,
}

/// Endpoint data of one walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub n_steps: u64,
    pub position: i64,
    /// ℓ(n, S(n)): mean of the two bond counts adjacent to the endpoint.
    pub local_time: f64,
    pub mode: SamplingMode,
    pub beta: f64,
}

/// Step-law thresholds: step right iff a uniform u64 is below `right[δ+64]`.
#[derive(Debug, Clone)]
pub struct StepTable {
    right: Vec<u64>,
    pub beta: f64,
}

impl StepTable {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta = {beta} must be positive")));
        }
        let right = (-DELTA_CLAMP..=DELTA_CLAMP)
            .map(|d| {
                let p = 1.0 / (1.0 + (-2.0 * beta * d as f64).exp());
                if p >= 1.0 {
                    u64::MAX
                } else {
                    (p * 18_446_744_073_709_551_616.0) as u64
                }
            })
            .collect();
        Ok(Self { right, beta })
    }

    /// P(step right | δ).
    pub fn p_right(&self, delta: i64) -> f64 {
        self.right[(delta.clamp(-DELTA_CLAMP, DELTA_CLAMP) + DELTA_CLAMP) as usize] as f64 / 18_446_744_073_709_551_616.0
    }
}

/// Walk state with bond counts on a growable window.
#[derive(Debug, Clone)]
pub struct WalkState {
    pub position: i64,
    pub steps: u64,
    /// bonds[k] counts crossings of (k − offset, k − offset + 1).
    bonds: Vec<u32>,
    offset: i64,
}

impl Default for WalkState {
    fn default() -> Self {
        Self::new()
    }
}

impl WalkState {
    pub fn new() -> Self {
        let cap = 1024;
        Self {
            position: 0,
            steps: 0,
            bonds: vec![0; cap],
            offset: cap as i64 / 2,
        }
    }

    /// Crossing count of the bond (j, j+1).
    pub fn bond(&self, j: i64) -> u32 {
        let k = j + self.offset;
        if k < 0 || k as usize >= self.bonds.len() {
            0
        } else {
            self.bonds[k as usize]
        }
    }

    /// δ at the current site.
    pub fn delta(&self) -> i64 {
        self.bond(self.position - 1) as i64 - self.bond(self.position) as i64
    }

    pub fn local_time(&self) -> f64 {
        0.5 * (self.bond(self.position - 1) as f64 + self.bond(self.position) as f64)
    }

    pub fn total_occupation(&self) -> u64 {
        self.bonds.iter().map(|&b| b as u64).sum()
    }

    fn grow(&mut self) {
        let old = self.bonds.len();
        let mut bonds = vec![0; 2 * old];
        let shift = old / 2;
        bonds[shift..shift + old].copy_from_slice(&self.bonds);
        self.bonds = bonds;
        self.offset += shift as i64;
    }
}

/// One step of the walk.
#[inline]
pub fn tsaw_step<R: RngCore + ?Sized>(state: &mut WalkState, table: &StepTable, rng: &mut R) {
    let p = state.position;
    let k = p + state.offset;
    if k < 1 || k as usize + 1 >= state.bonds.len() {
        state.grow();
        return tsaw_step(state, table, rng);
    }
    let k = k as usize;
    let left = state.bonds[k - 1] as i64;
    let right = state.bonds[k] as i64;
    let d = (left - right).clamp(-DELTA_CLAMP, DELTA_CLAMP);
    if rng.next_u64() < table.right[(d + DELTA_CLAMP) as usize] {
        state.bonds[k] += 1;
        state.position = p + 1;
    } else {
        state.bonds[k - 1] += 1;
        state.position = p - 1;
    }
    state.steps += 1;
}

/// Runs a fresh walk for `n_steps`.
pub fn tsaw_run<R: RngCore + ?Sized>(n_steps: u64, table: &StepTable, mode: SamplingMode, rng: &mut R) -> WalkRecord {
    let mut s = WalkState::new();
    for _ in 0..n_steps {
        tsaw_step(&mut s, table, rng);
    }
    WalkRecord {
        n_steps,
        position: s.position,
        local_time: s.local_time(),
        mode,
        beta: table.beta,
    }
}

/// Geometric number of steps on {0, 1, …} with mean `mean`.
pub fn geometric_steps<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let q = 1.0 / (1.0 + mean); // success probability
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    (u.ln() / (1.0 - q).ln()).floor() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_walks: usize,
    /// Fixed length, or mean length in geometric mode.
    pub n_steps: u64,
    pub beta: f64,
    pub mode: SamplingMode,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_walks: 100_000,
            n_steps: 100_000,
            beta: 1.0,
            mode: SamplingMode::FixedTime,
            seed: 42,
            execution: Execution::Parallel,
        }
    }
}

/// Independent walks; walk i draws from stream i of the master seed.
pub fn tsaw_ensemble(cfg: &EnsembleConfig) -> Result<Vec<WalkRecord>> {
    if cfg.n_walks == 0 || cfg.n_steps == 0 {
        return Err(Error::Config("n_walks and n_steps must be positive".into()));
    }
    let table = StepTable::new(cfg.beta)?;
    Ok(cfg.execution.map_indexed(cfg.n_walks, |i| {
        let mut rng = stream_rng(cfg.seed, TSAW_DOMAIN, i as u64);
        let n = match cfg.mode {
            SamplingMode::FixedTime => cfg.n_steps,
            SamplingMode::GeometricTime => geometric_steps(cfg.n_steps as f64, &mut rng),
        };
        tsaw_run(n, &table, cfg.mode, &mut rng)
    }))
}
