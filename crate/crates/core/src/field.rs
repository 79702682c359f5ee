//! Real scalar fields on the torus with lazily synchronised physical and
//! spectral representations.

use crate::fft;
use crate::grid::Grid2D;
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// A real scalar field carrying both point samples and Fourier coefficients.
///
/// At least one representation exists at all times; the other is computed on
/// first access and cached. All operations return new fields, so a value is
/// immutable (and safe to share across threads) once constructed.
#[derive(Debug)]
pub struct SpectralField {
    grid: Grid2D,
    values: OnceLock<Vec<f64>>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl Clone for SpectralField {
    fn clone(&self) -> Self {
        SpectralField {
            grid: self.grid,
            values: self.values.clone(),
            coeffs: self.coeffs.clone(),
        }
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid2D) -> Self {
        let values = OnceLock::new();
        values.set(vec![0.0; grid.len()]).unwrap();
        let coeffs = OnceLock::new();
        coeffs.set(vec![Complex64::default(); grid.len()]).unwrap();
        SpectralField {
            grid,
            values,
            coeffs,
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::BufferLength {
                got: values.len(),
                want: grid.len(),
            });
        }
        let cell = OnceLock::new();
        cell.set(values).unwrap();
        Ok(SpectralField {
            grid,
            values: cell,
            coeffs: OnceLock::new(),
        })
    }

    /// Build from Fourier coefficients. The caller must supply a conjugate
    /// symmetric array (`c(-k) = conj(c(k))`) or the field will not be real;
    /// use [`SpectralField::from_modes`] to get symmetry for free.
    pub fn from_coeffs(grid: Grid2D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::BufferLength {
                got: coeffs.len(),
                want: grid.len(),
            });
        }
        let cell = OnceLock::new();
        cell.set(coeffs).unwrap();
        Ok(SpectralField {
            grid,
            values: OnceLock::new(),
            coeffs: cell,
        })
    }

    /// Field with the given coefficients at integer modes `(k1, k2)`; the
    /// conjugate mode is inserted automatically so the field is real.
    pub fn from_modes(grid: Grid2D, modes: &[(i64, i64, Complex64)]) -> Result<Self> {
        let n = grid.n() as i64;
        let mut coeffs = vec![Complex64::default(); grid.len()];
        let bin = |k: i64| -> Result<usize> {
            if k < -n / 2 || k >= n / 2 {
                return Err(Error::param("mode", format!("wavenumber {k} out of range")));
            }
            Ok(if k >= 0 { k as usize } else { (k + n) as usize })
        };
        for &(k1, k2, c) in modes {
            let (i, j) = (bin(k1)?, bin(k2)?);
            coeffs[i * grid.n() + j] += c;
            if (k1, k2) != (0, 0) {
                let (im, jm) = (bin(-k1)?, bin(-k2)?);
                coeffs[im * grid.n() + jm] += c.conj();
            }
        }
        Self::from_coeffs(grid, coeffs)
    }

    /// Sample an analytic function on the grid.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                let (x, y) = grid.point(i, j);
                values.push(f(x, y));
            }
        }
        SpectralField::from_values(grid, values).unwrap()
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Point samples (computed from coefficients on first access).
    pub fn values(&self) -> &[f64] {
        self.values.get_or_init(|| {
            let mut buf = self
                .coeffs
                .get()
                .expect("field has neither values nor coeffs")
                .clone();
            fft::inverse(self.grid.n(), &mut buf);
            buf.into_iter().map(|c| c.re).collect()
        })
    }

    /// Fourier coefficients (computed from samples on first access).
    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let mut buf: Vec<Complex64> = self
                .values
                .get()
                .expect("field has neither values nor coeffs")
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fft::forward(self.grid.n(), &mut buf);
            buf
        })
    }

    pub fn mean(&self) -> f64 {
        match self.coeffs.get() {
            Some(c) => c[0].re,
            None => self.values().iter().sum::<f64>() / self.grid.len() as f64,
        }
    }

    /// New field with coefficients `f(xi, c)`.
    pub fn map_coeffs(&self, f: impl Fn((f64, f64), Complex64) -> Complex64) -> SpectralField {
        let n = self.grid.n();
        let src = self.coeffs();
        let mut out = Vec::with_capacity(src.len());
        for i in 0..n {
            for j in 0..n {
                out.push(f(self.grid.freq_pair(i, j), src[i * n + j]));
            }
        }
        SpectralField::from_coeffs(self.grid, out).unwrap()
    }

    /// Spectral derivative along `x1` (the Nyquist column is zeroed, as for
    /// any odd-symbol multiplier on an even grid).
    pub fn dx1(&self) -> SpectralField {
        self.directional_derivative(true)
    }

    /// Spectral derivative along `x2`.
    pub fn dx2(&self) -> SpectralField {
        self.directional_derivative(false)
    }

    fn directional_derivative(&self, first: bool) -> SpectralField {
        let nyq = -(self.grid.n() as i64) / 2;
        let g = self.grid;
        let n = g.n();
        let src = self.coeffs();
        let mut out = Vec::with_capacity(src.len());
        for i in 0..n {
            for j in 0..n {
                let k = if first {
                    g.wavenumber(i)
                } else {
                    g.wavenumber(j)
                };
                if k == nyq {
                    out.push(Complex64::default());
                } else {
                    let xi = if first { g.freq(i) } else { g.freq(j) };
                    out.push(Complex64::new(0.0, xi) * src[i * n + j]);
                }
            }
        }
        SpectralField::from_coeffs(g, out).unwrap()
    }

    /// Zero all modes outside the dealiasing cut.
    pub fn dealias(&self) -> SpectralField {
        let g = self.grid;
        let n = g.n();
        let src = self.coeffs();
        let mut out = Vec::with_capacity(src.len());
        for i in 0..n {
            for j in 0..n {
                if g.keep_mode(g.wavenumber(i), g.wavenumber(j)) {
                    out.push(src[i * n + j]);
                } else {
                    out.push(Complex64::default());
                }
            }
        }
        SpectralField::from_coeffs(g, out).unwrap()
    }

    /// Pointwise product of samples (no dealiasing; callers that need the
    /// 2/3 rule dealias the factors first).
    pub fn pointwise_mul(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_grid(other)?;
        let vals = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        SpectralField::from_values(self.grid, vals)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_values(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_values(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        // Scaling is cheap in whichever representation already exists.
        if let Some(c) = self.coeffs.get() {
            let out: Vec<Complex64> = c.iter().map(|&z| z * s).collect();
            return SpectralField::from_coeffs(self.grid, out).unwrap();
        }
        let vals = self.values().iter().map(|v| v * s).collect();
        SpectralField::from_values(self.grid, vals).unwrap()
    }

    fn zip_values(
        &self,
        other: &SpectralField,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<SpectralField> {
        self.check_grid(other)?;
        let vals = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(&a, &b)| f(a, b))
            .collect();
        SpectralField::from_values(self.grid, vals)
    }

    fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                a: self.grid.n(),
                b: other.grid.n(),
            });
        }
        Ok(())
    }

    /// `L^p` norm by uniform grid quadrature; `p = f64::INFINITY` gives the
    /// max norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    /// `L^2` norm through the Parseval identity (exact for band-limited data;
    /// cross-checks the quadrature path).
    pub fn l2_norm_parseval(&self) -> f64 {
        let sum: f64 = self.coeffs().iter().map(|c| c.norm_sqr()).sum();
        self.grid.period() * sum.sqrt()
    }

    /// Max norm of the largest conjugate-symmetry defect `|c(-k) - conj(c(k))|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.grid.n();
        let c = self.coeffs();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let im = (n - i) % n;
                let jm = (n - j) % n;
                worst = worst.max((c[im * n + jm] - c[i * n + j].conj()).norm());
            }
        }
        worst
    }
}

/// `L^p` norm of a field (uniform Riemann sum for finite `p`, max for `p = inf`).
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    if !(p >= 1.0) {
        return Err(Error::param("p", format!("{p} is not in [1, inf]")));
    }
    let cell = f.grid().cell_area();
    if p == 1.0 {
        return Ok(f.values().iter().map(|v| v.abs()).sum::<f64>() * cell);
    }
    if p == 2.0 {
        return Ok((f.values().iter().map(|v| v * v).sum::<f64>() * cell).sqrt());
    }
    let sum: f64 = f.values().iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * cell).powf(1.0 / p))
}
