// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Ultracold atoms in a harmonic trap whose central barrier is the
//! self-consistent light field of a driven, lossy Fabry-Perot cavity.
//!
//! The crate covers the mean-field level (split-step Gross-Pitaevskii
//! propagation with adiabatic field elimination, a double-peaked Gaussian
//! variational surface) and the beyond-mean-field two-mode model with its
//! collapse-revival dynamics. Everything runs in oscillator units,
//! hbar = m = omega = 1; see [`units`] for the conversion boundary.

pub mod cavity;
pub mod error;
pub mod gpe;
pub mod grid;
pub mod two_mode;
pub mod units;
pub mod variational;
pub mod wavefunction;

pub use error::{Error, Result};
pub use grid::Grid;
pub use units::{ModelParams, SiParams, UnitSystem};
pub use wavefunction::OrderParameter;
