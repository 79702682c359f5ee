//! Periodic grid on the 2-torus.

use crate::{Error, Result};

/// Default fraction of modes kept by the 2/3 dealiasing rule.
pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

/// Uniform `n x n` grid on a square torus of side `period`.
///
/// Index `(i, j)` maps to the point `(i*dx, j*dx)` and row-major sample
/// index `i*n + j`; the first axis is `x1`. Frequencies are the standard
/// signed integer wavenumbers scaled by `2*pi/period`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    n: usize,
    period: f64,
    dealias_fraction: f64,
}

impl Grid2D {
    /// Grid with the default `2*pi` period and 2/3 dealiasing.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_period(n, std::f64::consts::TAU)
    }

    pub fn with_period(n: usize, period: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::param("period", format!("{period} not positive")));
        }
        Ok(Grid2D {
            n,
            period,
            dealias_fraction: DEFAULT_DEALIAS,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Grid spacing.
    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Area of one grid cell (quadrature weight).
    pub fn cell_area(&self) -> f64 {
        let dx = self.dx();
        dx * dx
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Signed integer wavenumber for FFT bin `i` (0..n), in `-n/2..n/2-1`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 - 1 {
            i
        } else {
            i - n
        }
    }

    /// Physical frequency `xi = wavenumber * 2*pi/period` for bin `i`.
    pub fn freq(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * std::f64::consts::TAU / self.period
    }

    /// Frequency vector for the coefficient at flat index `(i, j)`.
    pub fn freq_pair(&self, i: usize, j: usize) -> (f64, f64) {
        (self.freq(i), self.freq(j))
    }

    /// Largest retained integer wavenumber under the dealiasing rule.
    pub fn dealias_cut(&self) -> i64 {
        ((self.n as f64) * self.dealias_fraction / 2.0).floor() as i64
    }

    /// Largest retained physical frequency magnitude per axis.
    pub fn freq_cut(&self) -> f64 {
        self.dealias_cut() as f64 * std::f64::consts::TAU / self.period
    }

    /// Whether the mode with integer wavenumbers `(k1, k2)` survives dealiasing.
    pub fn keep_mode(&self, k1: i64, k2: i64) -> bool {
        let cut = self.dealias_cut();
        k1.abs() <= cut && k2.abs() <= cut
    }

    /// Position of sample `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.dx(), j as f64 * self.dx())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(8).is_err());
        assert!(Grid2D::new(48).is_err());
        assert!(Grid2D::new(16).is_ok());
    }

    #[test]
    fn wavenumbers_are_signed() {
        let g = Grid2D::new(16).unwrap();
        assert_eq!(g.wavenumber(0), 0);
        assert_eq!(g.wavenumber(7), 7);
        assert_eq!(g.wavenumber(8), -8);
        assert_eq!(g.wavenumber(15), -1);
    }

    #[test]
    fn freq_scales_with_period() {
        let g = Grid2D::with_period(16, std::f64::consts::TAU).unwrap();
        assert!((g.freq(1) - 1.0).abs() < 1e-15);
        let g2 = Grid2D::with_period(16, 1.0).unwrap();
        assert!((g2.freq(1) - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn dealias_cut_two_thirds() {
        let g = Grid2D::new(256).unwrap();
        assert_eq!(g.dealias_cut(), 85);
        assert!(g.keep_mode(85, 0));
        assert!(!g.keep_mode(86, 0));
    }
}
