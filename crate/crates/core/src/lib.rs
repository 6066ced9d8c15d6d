//! Marginal densities of the true self-repelling motion at a fixed time and
//! at an independent exponential time, with the numerical machinery they
//! rest on and independent stochastic cross-checks.
//!
//! * [`airy`] and [`spectrum`]: the normalized Airy function u, the zeros
//!   δ'_k of h ↦ u'(−h) and the mixture weights p_k.
//! * [`special`]: Γ, Tricomi U and Mittag-Leffler functions and densities.
//! * [`marginals`]: ν₁, ν₂, ν̂₁, ν̂₂, moments, CDFs and tail constants.
//! * [`pde`] and [`transforms`]: the Feynman–Kac problem for φ and the
//!   transform chain that leads to the closed forms.
//! * [`stochastic`]: Brownian area Monte Carlo and the lattice walk.

// `!(x > 0.0)` is used on purpose so NaN fails the check; tabulated
// constants keep all published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod airy;
pub mod error;
pub mod exec;
pub mod marginals;
pub mod pde;
pub mod quad;
pub mod roots;
pub mod special;
pub mod spectrum;
pub mod stochastic;
pub mod table;
pub mod transforms;

pub use error::{Error, Result};
pub use exec::Execution;
pub use marginals::{MarginalKind, Marginals};
pub use spectrum::{spectrum, SpectralData};
