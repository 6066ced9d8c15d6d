//! Gamma, Tricomi U and Mittag-Leffler evaluators.

pub mod gamma;
pub mod mittag_leffler;
pub mod tricomi;

pub use gamma::{gamma_fn, gamma_self_check, ln_gamma};
pub use mittag_leffler::{ml23_density_tricomi, ml_density, ml_function, ml_moment, MittagLefflerSpec};
pub use tricomi::{tricomi_u, TricomiParams};
