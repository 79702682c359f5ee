//! Littlewood-Paley decomposition on the periodic grid.
//!
//! The filter bank uses the standard smooth bump construction: a C^infinity
//! ramp built from `exp(-1/s)` glue yields a cutoff `chi` equal to 1 on
//! `[0, 1/2]` and 0 on `[1, inf)`, and the annular profile
//! `phi(rho) = chi(rho/2) - chi(rho)` supported in `[1/2, 2]` with
//! `phi(1) = 1` exactly. Blocks `q >= 0` rescale `phi` dyadically; block
//! `q = -1` carries `chi` itself. The highest usable block index is tied to
//! the grid's dealiasing cutoff so every retained block is fully resolved.

use crate::field::SpectralField;
use crate::grid::Grid2D;
use crate::{Error, Result};

fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn ramp(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = psi(s);
        a / (a + psi(1.0 - s))
    }
}

/// Smooth radial cutoff: 1 on `rho <= 1/2`, 0 on `rho >= 1`.
pub fn chi(rho: f64) -> f64 {
    1.0 - ramp(2.0 * rho - 1.0)
}

/// Annular profile `chi(rho/2) - chi(rho)`, supported in `[1/2, 2]`.
pub fn annulus(rho: f64) -> f64 {
    chi(0.5 * rho) - chi(rho)
}

/// Dyadic filter bank for one grid. Valid block indices are
/// `-1 <= q <= q_max`.
#[derive(Clone, Copy, Debug)]
pub struct DyadicFilterBank {
    grid: Grid2D,
    q_max: i32,
}

/// Builds the filter bank, requiring at least three blocks (`q_max >= 1`).
pub fn build_filter_bank(grid: Grid2D) -> Result<DyadicFilterBank> {
    let q_max = (grid.freq_cut().log2().floor() as i32) - 1;
    if q_max < 1 {
        return Err(Error::GridTooCoarse);
    }
    Ok(DyadicFilterBank { grid, q_max })
}

impl DyadicFilterBank {
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Number of blocks, counting `q = -1`.
    pub fn len(&self) -> usize {
        (self.q_max + 2) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol of block `q` at radius `rho` (not range checked).
    pub fn block_symbol(&self, q: i32, rho: f64) -> f64 {
        if q == -1 {
            chi(rho)
        } else {
            annulus(rho * 0.5f64.powi(q))
        }
    }

    /// Symbol of the low-pass partial sum `S_q`, i.e. `chi(rho / 2^q)`.
    pub fn low_pass_symbol(&self, q: i32, rho: f64) -> f64 {
        chi(rho * 0.5f64.powi(q))
    }

    fn check_q(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.q_max {
            return Err(Error::BlockRange {
                q,
                q_max: self.q_max,
            });
        }
        Ok(())
    }

    /// Frequency-localised piece `Delta_q f`.
    pub fn dyadic_block(&self, f: &SpectralField, q: i32) -> Result<SpectralField> {
        self.check_grid(f)?;
        self.check_q(q)?;
        Ok(f.map_coeffs(|(x1, x2), c| c * self.block_symbol(q, x1.hypot(x2))))
    }

    /// Low-pass partial sum `S_q f` for `0 <= q <= q_max + 1`. `S_0` equals
    /// the `q = -1` block and `S_{q_max+1}` reproduces any field whose
    /// spectrum sits inside `|xi| <= 2^{q_max}`.
    pub fn low_pass(&self, f: &SpectralField, q: i32) -> Result<SpectralField> {
        self.check_grid(f)?;
        if q < 0 || q > self.q_max + 1 {
            return Err(Error::BlockRange {
                q,
                q_max: self.q_max + 1,
            });
        }
        Ok(f.map_coeffs(|(x1, x2), c| c * self.low_pass_symbol(q, x1.hypot(x2))))
    }

    /// `L^p` norms of every block, indexed `q = -1 ..= q_max`.
    pub fn block_norms(&self, f: &SpectralField, p: f64) -> Result<Vec<f64>> {
        (-1..=self.q_max)
            .map(|q| self.dyadic_block(f, q)?.lp_norm(p))
            .collect()
    }

    /// Besov norm with dyadic weight `2^{qs}` and logarithmic correction
    /// `(|q| + 1)^{s_log}`.
    pub fn besov_norm(&self, f: &SpectralField, spec: &BesovSpec) -> Result<f64> {
        self.check_grid(f)?;
        let weighted: Vec<f64> = (-1..=self.q_max)
            .map(|q| {
                let norm = self.dyadic_block(f, q)?.lp_norm(spec.p)?;
                let w = 2.0f64.powf(spec.s * q as f64) * ((q.abs() + 1) as f64).powf(spec.s_log);
                Ok(w * norm)
            })
            .collect::<Result<_>>()?;
        if spec.r.is_infinite() {
            Ok(weighted.into_iter().fold(0.0, f64::max))
        } else {
            Ok(weighted
                .into_iter()
                .map(|x| x.powf(spec.r))
                .sum::<f64>()
                .powf(1.0 / spec.r))
        }
    }

    fn check_grid(&self, f: &SpectralField) -> Result<()> {
        if f.grid() != self.grid {
            return Err(Error::GridMismatch {
                a: self.grid.n(),
                b: f.grid().n(),
            });
        }
        Ok(())
    }
}

/// Index data of a Besov space `B^{s, s_log}_{p, r}`: regularity `s`, a
/// logarithmic shift `s_log`, Lebesgue exponent `p`, summation exponent `r`.
#[derive(Clone, Copy, Debug)]
pub struct BesovSpec {
    pub s: f64,
    pub s_log: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovSpec {
    pub fn new(s: f64, s_log: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() || !s_log.is_finite() {
            return Err(Error::param("s", "regularity indices must be finite"));
        }
        if !(p >= 1.0) {
            return Err(Error::param("p", format!("{p} must be >= 1")));
        }
        if !(r >= 1.0) {
            return Err(Error::param("r", format!("{r} must be >= 1")));
        }
        Ok(BesovSpec { s, s_log, p, r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::MultiplierSymbol;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn bank(n: usize) -> DyadicFilterBank {
        build_filter_bank(Grid2D::new(n).unwrap()).unwrap()
    }

    #[test]
    fn profile_supports_and_normalisation() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(chi(3.7), 0.0);
        assert_eq!(annulus(1.0), 1.0);
        assert_eq!(annulus(0.49), 0.0);
        assert_eq!(annulus(2.0), 0.0);
        assert!(annulus(0.8) > 0.0 && annulus(0.8) < 1.0);
    }

    #[test]
    fn q_max_follows_dealias_cutoff() {
        // n=256 keeps |k| <= 85, so blocks -1..=5 fit (2^6 = 64 <= 85 < 128).
        assert_eq!(bank(256).q_max(), 5);
        assert_eq!(bank(64).q_max(), 3);
        assert_eq!(bank(16).q_max(), 1);
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        // A long period shrinks the frequency cutoff below the third block.
        let g = Grid2D::with_period(16, 16.0 * std::f64::consts::PI).unwrap();
        assert!(matches!(build_filter_bank(g), Err(Error::GridTooCoarse)));
    }

    #[test]
    fn partition_of_unity_inside_resolved_band() {
        let b = bank(256);
        let top = 2.0f64.powi(b.q_max());
        for i in 0..=400 {
            let rho = top * i as f64 / 400.0;
            let sum: f64 = (-1..=b.q_max()).map(|q| b.block_symbol(q, rho)).sum();
            assert!(
                (sum - 1.0).abs() <= 1e-12,
                "partition defect {} at rho={rho}",
                (sum - 1.0).abs()
            );
        }
    }

    #[test]
    fn block_range_errors() {
        let b = bank(64);
        let f = SpectralField::zeros(b.grid());
        assert!(matches!(
            b.dyadic_block(&f, -2),
            Err(Error::BlockRange { .. })
        ));
        assert!(matches!(
            b.dyadic_block(&f, b.q_max() + 1),
            Err(Error::BlockRange { .. })
        ));
        assert!(b.low_pass(&f, b.q_max() + 1).is_ok());
        assert!(b.low_pass(&f, b.q_max() + 2).is_err());
    }

    #[test]
    fn pure_mode_lands_in_its_block() {
        let b = bank(256);
        for q in 0..=b.q_max() {
            let k = 1i64 << q;
            let f =
                SpectralField::from_modes(b.grid(), &[(k, 0, Complex64::new(0.5, 0.0))]).unwrap();
            let own = b.dyadic_block(&f, q).unwrap();
            let err = own.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap();
            assert!(err < 1e-13, "block q={q} should reproduce mode 2^q");
            for other in -1..=b.q_max() {
                if (other - q).abs() >= 2 {
                    let leak = b.dyadic_block(&f, other).unwrap();
                    assert!(leak.lp_norm(f64::INFINITY).unwrap() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn constant_field_is_the_low_block() {
        let b = bank(64);
        let f = SpectralField::from_fn(b.grid(), |_, _| 2.5);
        let low = b.dyadic_block(&f, -1).unwrap();
        let err = low.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err < 1e-13);
        for q in 0..=b.q_max() {
            assert!(
                b.dyadic_block(&f, q)
                    .unwrap()
                    .lp_norm(f64::INFINITY)
                    .unwrap()
                    < 1e-15
            );
        }
    }

    #[test]
    fn blocks_sum_to_identity_on_band_limited_fields() {
        let b = bank(256);
        let top = 1i64 << b.q_max();
        let f = SpectralField::from_modes(
            b.grid(),
            &[
                (1, 0, Complex64::new(0.4, 0.1)),
                (3, -2, Complex64::new(-0.2, 0.3)),
                (top / 2, 5, Complex64::new(0.15, -0.1)),
                (top, 0, Complex64::new(0.05, 0.2)),
            ],
        )
        .unwrap();
        let mut sum = SpectralField::zeros(b.grid());
        for q in -1..=b.q_max() {
            sum = sum.add(&b.dyadic_block(&f, q).unwrap()).unwrap();
        }
        let err = sum.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err <= 1e-10, "reconstruction defect {err}");

        let full = b.low_pass(&f, b.q_max() + 1).unwrap();
        let err2 = full.sub(&f).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err2 <= 1e-10);
    }

    #[test]
    fn low_pass_zero_equals_lowest_block() {
        let b = bank(64);
        let f = SpectralField::from_fn(b.grid(), |x, y| {
            1.0 + x.cos() + (3.0 * y).sin() + (7.0 * x).cos() * (2.0 * y).cos()
        });
        let s0 = b.low_pass(&f, 0).unwrap();
        let d = b.dyadic_block(&f, -1).unwrap();
        let err = s0.sub(&d).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err < 1e-14);
    }

    #[test]
    fn telescoping_low_pass() {
        let b = bank(128);
        let f = SpectralField::from_fn(b.grid(), |x, y| {
            x.cos() * (2.0 * y).sin() + (11.0 * x).sin() + (6.0 * y).cos()
        });
        for q in 0..=b.q_max() {
            let mut acc = b.dyadic_block(&f, -1).unwrap();
            for j in 0..q {
                acc = acc.add(&b.dyadic_block(&f, j).unwrap()).unwrap();
            }
            let direct = b.low_pass(&f, q).unwrap();
            let err = direct.sub(&acc).unwrap().lp_norm(f64::INFINITY).unwrap();
            assert!(err < 1e-12, "telescoping defect {err} at q={q}");
        }
    }

    #[test]
    fn besov_norm_of_single_mode() {
        let b = bank(256);
        let q = 3i32;
        let f = SpectralField::from_fn(b.grid(), |x, _| (8.0 * x).cos());
        // ||cos|| in L^inf is 1 and the mode sits alone in block 3, so the
        // norm is exactly the weight.
        for (s, s_log) in [(0.0, 0.0), (1.5, 0.0), (0.0, 2.0), (-0.5, 1.0)] {
            let spec = BesovSpec::new(s, s_log, f64::INFINITY, 1.0).unwrap();
            let got = b.besov_norm(&f, &spec).unwrap();
            let want = 2.0f64.powf(s * q as f64) * ((q + 1) as f64).powf(s_log);
            assert!(
                (got - want).abs() <= 1e-3 * want,
                "besov weight mismatch: {got} vs {want}"
            );
        }
    }

    #[test]
    fn besov_low_block_uses_absolute_weight() {
        let b = bank(64);
        let f = SpectralField::from_fn(b.grid(), |_, _| 1.0);
        let spec = BesovSpec::new(1.0, 3.0, 2.0, 1.0).unwrap();
        let got = b.besov_norm(&f, &spec).unwrap();
        // constant: ||1||_{L^2} = 2*pi, weight 2^{ -1 } * (|-1|+1)^3 = 4.
        let want = 0.5 * 8.0 * std::f64::consts::TAU;
        assert!((got - want).abs() < 1e-10 * want);
    }

    #[test]
    fn besov_r_monotonicity() {
        let b = bank(128);
        let f = SpectralField::from_fn(b.grid(), |x, y| {
            (2.0 * x).cos() + 0.3 * (9.0 * y).sin() + 0.1 * (17.0 * (x + y)).cos()
        });
        let mut prev = f64::INFINITY;
        for r in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let spec = BesovSpec::new(0.3, 0.5, 2.0, r).unwrap();
            let cur = b.besov_norm(&f, &spec).unwrap();
            assert!(
                cur <= prev * (1.0 + 1e-12),
                "ell^r norms must decrease in r"
            );
            prev = cur;
        }
    }

    #[test]
    fn besov_spec_validation() {
        assert!(BesovSpec::new(0.0, 0.0, 0.5, 1.0).is_err());
        assert!(BesovSpec::new(0.0, 0.0, 2.0, 0.0).is_err());
        assert!(BesovSpec::new(f64::NAN, 0.0, 2.0, 1.0).is_err());
        assert!(BesovSpec::new(0.0, 0.0, f64::INFINITY, f64::INFINITY).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        // Bernstein equivalence: on block q >= 0 the k-th derivative scales
        // like 2^{qk} within fixed constants.
        #[test]
        fn derivative_scales_dyadically_on_blocks(
            seed in 0u64..1000,
            p_idx in 0usize..3,
        ) {
            let b = bank(128);
            let p = [1.0, 2.0, f64::INFINITY][p_idx];
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut modes = Vec::new();
            let top = 1i64 << b.q_max();
            for k1 in -top..=top {
                for k2 in -top..=top {
                    if (k1, k2) <= (0, 0) {
                        continue;
                    }
                    if rng.random::<f64>() < 0.1 {
                        modes.push((
                            k1,
                            k2,
                            Complex64::new(
                                rng.random::<f64>() - 0.5,
                                rng.random::<f64>() - 0.5,
                            ),
                        ));
                    }
                }
            }
            prop_assume!(!modes.is_empty());
            let f = SpectralField::from_modes(b.grid(), &modes).unwrap();
            for q in 0..=b.q_max() {
                let block = b.dyadic_block(&f, q).unwrap();
                let base = block.lp_norm(p).unwrap();
                if base < 1e-9 {
                    continue;
                }
                for k in 1u32..=2 {
                    let deriv = crate::symbol::apply_multiplier(
                        &block,
                        &MultiplierSymbol::radial(move |rho| rho.powi(k as i32)),
                    );
                    let ratio = deriv.lp_norm(p).unwrap()
                        / (2.0f64.powi(q * k as i32) * base);
                    prop_assert!(
                        (1.0 / 64.0..=64.0).contains(&ratio),
                        "ratio {ratio} out of range at q={q}, k={k}, p={p}"
                    );
                }
            }
        }
    }
}
