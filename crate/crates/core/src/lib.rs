//! Traveling fronts of a two-species FKPP growth system and their convective
//! spectral stability.
//!
//! The system couples an active density `A` that branches and deactivates on
//! contact with an inactive density `I`:
//!
//! ```text
//! A_t = A_zz + A - A (A + I)
//! I_t = d I_zz + r A + A (A + I)
//! ```
//!
//! This crate is `no_std` (it needs `alloc`). It contains:
//!
//! - [`model`]: the wave ODE, its reduced `d = 0` limit and exact fixed-point spectra,
//! - [`ode`]: an adaptive Dormand–Prince 5(4) integrator with dense output and events,
//! - [`wave`]: shooting from the unstable manifold, invading-front root finding and
//!   checks of the qualitative/quantitative wave properties,
//! - [`spectral`]: weights, the linearization family, essential-spectrum curves, the
//!   energy bound and the Evans function with winding numbers,
//! - [`pde`]: method-of-lines simulation in the lab and moving frames,
//! - [`feynman_kac`]: first-passage Monte Carlo and the tail-bound check.
//!
//! IO, configuration files and the command line live in the companion `fkpp` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod feynman_kac;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod pde;
pub mod quad;
pub mod roots;
pub mod spectral;
pub mod wave;

pub use error::{Error, Result};
pub use model::{ModelParams, WaveState};

/// Complex scalar used throughout the spectral code.
pub type C64 = num_complex::Complex64;
