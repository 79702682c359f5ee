//! Fourier multipliers: the logarithmically damped dissipation symbol, the
//! logarithmic Riesz transform, and Biot-Savart inversion.

use crate::field::SpectralField;
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Scalar symbol value `rho^beta / log^alpha(lambda + rho)`.
pub fn log_damped_ratio(rho: f64, alpha: f64, beta: f64, lambda: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    rho.powf(beta) / (lambda + rho).ln().powf(alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    /// `m(xi) = m(|xi|)`; multiplies coefficients by a real value.
    Radial,
    /// Odd in `xi_1`, even in `xi_2`; multiplies coefficients by `i * c(xi)`
    /// where `c` is the stored real coefficient.
    X1Odd,
}

#[derive(Clone, Copy, Debug)]
pub struct SymbolParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

/// A Fourier multiplier with either radial or `xi_1`-odd symmetry.
#[derive(Clone)]
pub struct MultiplierSymbol {
    kind: SymbolKind,
    params: Option<SymbolParams>,
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .finish()
    }
}

impl MultiplierSymbol {
    /// Custom radial symbol from a profile of `rho = |xi|`.
    pub fn radial(profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MultiplierSymbol {
            kind: SymbolKind::Radial,
            params: None,
            eval: Arc::new(move |x1, x2| profile(x1.hypot(x2))),
        }
    }

    /// Custom `xi_1`-odd symbol; `coefficient` is the real factor multiplying `i`.
    pub fn x1_odd(coefficient: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        MultiplierSymbol {
            kind: SymbolKind::X1Odd,
            params: None,
            eval: Arc::new(coefficient),
        }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn params(&self) -> Option<SymbolParams> {
        self.params
    }

    /// Symbol value at a frequency vector. For `X1Odd` symbols this is the
    /// real coefficient `c(xi)` of the multiplier `i*c(xi)`.
    pub fn eval(&self, xi1: f64, xi2: f64) -> f64 {
        (self.eval)(xi1, xi2)
    }

    /// Pointwise product with another radial symbol.
    pub fn radial_product(&self, other: &MultiplierSymbol) -> Result<MultiplierSymbol> {
        if self.kind != SymbolKind::Radial || other.kind != SymbolKind::Radial {
            return Err(Error::param("kind", "radial_product needs radial symbols"));
        }
        let a = self.eval.clone();
        let b = other.eval.clone();
        Ok(MultiplierSymbol {
            kind: SymbolKind::Radial,
            params: None,
            eval: Arc::new(move |x1, x2| a(x1, x2) * b(x1, x2)),
        })
    }
}

fn validate_common(alpha: f64, lambda: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("{alpha} must be >= 0")));
    }
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::param(
            "lambda",
            format!("{lambda} must be > 1 (log base degenerate otherwise)"),
        ));
    }
    Ok(())
}

/// The dissipation symbol `m(rho) = rho^beta / log^alpha(lambda + rho)`.
pub fn log_dissipation_symbol(alpha: f64, beta: f64, lambda: f64) -> Result<MultiplierSymbol> {
    validate_common(alpha, lambda)?;
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::param("beta", format!("{beta} not in (0, 2]")));
    }
    Ok(MultiplierSymbol {
        kind: SymbolKind::Radial,
        params: Some(SymbolParams {
            alpha,
            beta,
            lambda,
        }),
        eval: Arc::new(move |x1, x2| log_damped_ratio(x1.hypot(x2), alpha, beta, lambda)),
    })
}

/// The logarithmic Riesz transform `R_alpha = (d_1/|D|) log^alpha(lambda+|D|)`,
/// an `xi_1`-odd symbol with coefficient `xi_1/|xi| * log^alpha(lambda+|xi|)`
/// (the multiplier is `i` times that). The value at `xi = 0` is 0 by the
/// zero-mode convention for `|D|^{-1}`.
pub fn riesz_log_symbol(alpha: f64, lambda: f64) -> Result<MultiplierSymbol> {
    validate_common(alpha, lambda)?;
    Ok(MultiplierSymbol {
        kind: SymbolKind::X1Odd,
        params: Some(SymbolParams {
            alpha,
            beta: 0.0,
            lambda,
        }),
        eval: Arc::new(move |x1, x2| {
            let rho = x1.hypot(x2);
            if rho == 0.0 {
                0.0
            } else {
                x1 / rho * (lambda + rho).ln().powf(alpha)
            }
        }),
    })
}

/// Apply a multiplier to a field. Odd symbols zero the `xi_1` Nyquist column,
/// which has no conjugate partner on an even grid.
pub fn apply_multiplier(f: &SpectralField, m: &MultiplierSymbol) -> SpectralField {
    let nyquist_freq = {
        let g = f.grid();
        -((g.n() / 2) as f64) * std::f64::consts::TAU / g.period()
    };
    match m.kind {
        SymbolKind::Radial => f.map_coeffs(|(x1, x2), c| c * m.eval(x1, x2)),
        SymbolKind::X1Odd => f.map_coeffs(|(x1, x2), c| {
            if x1 == nyquist_freq {
                Complex64::default()
            } else {
                c * Complex64::new(0.0, m.eval(x1, x2))
            }
        }),
    }
}

/// Velocity from vorticity: `v = grad^perp Laplacian^{-1} omega`, i.e.
/// `v_hat = (i xi_2, -i xi_1) omega_hat / |xi|^2` with zero mode zero.
/// Requires mean-free vorticity.
pub fn biot_savart(omega: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let scale = omega.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean = omega.mean();
    if mean.abs() > 1e-10 * (1.0 + scale) {
        return Err(Error::NonZeroMean { mean });
    }
    let v1 = omega.map_coeffs(|(x1, x2), c| {
        let k2 = x1 * x1 + x2 * x2;
        if k2 == 0.0 {
            Complex64::default()
        } else {
            c * Complex64::new(0.0, x2 / k2)
        }
    });
    let v2 = omega.map_coeffs(|(x1, x2), c| {
        let k2 = x1 * x1 + x2 * x2;
        if k2 == 0.0 {
            Complex64::default()
        } else {
            c * Complex64::new(0.0, -x1 / k2)
        }
    });
    Ok((v1, v2))
}
