//! Numerical laboratory for the logarithmically damped dissipation operator
//! `|D|^beta / log^alpha(lambda + |D|)` and the 2D Euler-Boussinesq system
//! built on top of it.
//!
//! The crate is organised around a periodic pseudo-spectral core:
//!
//! * [`grid`] / [`field`]: the torus grid and real scalar fields with lazily
//!   synchronised physical/spectral representations,
//! * [`symbol`]: Fourier multipliers (the damped dissipation symbol, the
//!   logarithmic Riesz transform, Biot-Savart inversion),
//! * [`dyadic`]: Littlewood-Paley blocks and generalized Besov norms with
//!   logarithmic weights,
//! * [`phi`] / [`kernel`]: scalar analysis of `phi(r) = r^beta/log^alpha(lambda+r)`,
//!   Askey sign conditions, and direct kernel evaluation by radial Fourier
//!   inversion in dimensions 1..3,
//! * [`evolve`]: transport-diffusion and Boussinesq time integration with
//!   monitor hooks,
//! * [`verify`]: an inequality-verification harness reporting empirical
//!   constants for the Bernstein and commutator estimates.

pub mod dyadic;
pub mod error;
pub mod evolve;
mod fft;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod phi;
pub mod quad;
pub mod symbol;
pub mod verify;

pub use error::Error;
pub use field::SpectralField;
pub use grid::Grid2D;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
