//! Error type shared across the crate.

/// Errors produced by grid construction, parameter validation, solvers and
/// quadrature routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two >= 16")]
    GridSize(usize),

    #[error("grid mismatch: {a}x{a} vs {b}x{b}")]
    GridMismatch { a: usize, b: usize },

    #[error("buffer length {got} does not match grid ({want} samples)")]
    BufferLength { got: usize, want: usize },

    #[error("invalid parameter {name}: {why}")]
    Param { name: &'static str, why: String },

    #[error("input must have zero mean (got {mean:.3e})")]
    NonZeroMean { mean: f64 },

    #[error("dyadic block q={q} outside valid range [-1, {q_max}]")]
    BlockRange { q: i32, q_max: i32 },

    #[error("grid too small to host three dyadic blocks")]
    GridTooCoarse,

    #[error("CFL violation: dt={dt:.3e} exceeds advective limit {dt_max:.3e}")]
    Cfl { dt: f64, dt_max: f64 },

    #[error("non-finite {what} detected at step {step}")]
    NonFinite { step: usize, what: &'static str },

    #[error(
        "quadrature tail bound unreachable: e^(-t phi) still {remainder:.3e} at cutoff {cutoff:.3e}"
    )]
    QuadratureTail { cutoff: f64, remainder: f64 },

    #[error("quadrature failed to converge (estimated error {err:.3e} > tolerance {tol:.3e})")]
    QuadratureConvergence { err: f64, tol: f64 },
}

impl Error {
    /// Shorthand for parameter validation failures.
    pub fn param(name: &'static str, why: impl Into<String>) -> Self {
        Error::Param {
            name,
            why: why.into(),
        }
    }
}
