//! Heat-type kernel of the damped dissipation semigroup: the radial inverse
//! Fourier transform of `exp(-t phi(|xi|))` in dimensions one to three, its
//! total mass, pointwise positivity scan, and an `L^p` contraction probe for
//! the discrete semigroup.
//!
//! Pointwise values use one of two validated quadratures, whichever costs
//! fewer oscillations:
//!
//! * direct: the radial Fourier integral over `[0, P]` with panels aligned
//!   to half-periods of the trigonometric factor, where `P` is a certified
//!   frequency cutoff (tail majorant below 1e-10);
//! * rotated: the integration contour turned onto the positive imaginary
//!   axis, legal because `Re phi >= 0` in the closed first quadrant for
//!   `beta <= 1`, which trades oscillation for `exp(-r s)` decay.
//!
//! The total mass splits as an exact head (radial quadrature of kernel
//! values out to a fixed radius) plus a closed-form tail obtained by
//! swapping the radial and contour integrals, so slowly decaying kernels
//! (`r^{-d-beta}` tails) still sum to unity at 1e-8 accuracy.

use crate::field::SpectralField;
use crate::phi::{askey_check, default_askey_radii, AskeyReport, PhiParams};
use crate::quad::{bessel_j0, bessel_k0, bessel_k1, integrate_panels, QuadTol};
use crate::symbol::MultiplierSymbol;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Tail mass allowed beyond the frequency cutoff.
pub const CUTOFF_TOL: f64 = 1e-10;
const CUTOFF_CAP: f64 = 1e9;

/// Kernel evaluation parameters: symbol profile, time, spatial dimension.
#[derive(Clone, Copy, Debug)]
pub struct KernelParams {
    phi: PhiParams,
    t: f64,
    d: usize,
}

impl KernelParams {
    pub fn new(phi: PhiParams, t: f64, d: usize) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param("t", format!("{t} must be positive")));
        }
        if !(1..=3).contains(&d) {
            return Err(Error::param("d", format!("{d} must be 1, 2 or 3")));
        }
        Ok(KernelParams { phi, t, d })
    }

    pub fn phi(&self) -> PhiParams {
        self.phi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `exp(-t phi(i s))` continued to the imaginary axis.
    fn decay_rotated(&self, s: f64) -> Complex64 {
        if s == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let z = Complex64::new(0.0, s);
        let num = z.powf(self.phi.beta());
        let den = (z + self.phi.lambda()).ln().powf(self.phi.alpha());
        (-(self.t) * num / den).exp()
    }

    fn decay(&self, rho: f64) -> f64 {
        (-self.t * self.phi.phi(rho)).exp()
    }
}

/// Prepared evaluator carrying the certified frequency cutoff.
pub struct KernelEvaluator {
    params: KernelParams,
    cutoff: f64,
    tail_bound: f64,
}

impl KernelEvaluator {
    pub fn new(params: KernelParams) -> Result<Self> {
        let (cutoff, tail_bound) = frequency_cutoff(&params)?;
        Ok(KernelEvaluator {
            params,
            cutoff,
            tail_bound,
        })
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    /// Frequency cutoff `P` whose tail majorant is certified below
    /// [`CUTOFF_TOL`].
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Kernel value at radius `r >= 0`.
    pub fn value(&self, r: f64) -> Result<f64> {
        assert!(r >= 0.0 && r.is_finite());
        let p = &self.params;
        if r == 0.0 {
            return self.value_direct(0.0);
        }
        let direct_cycles = r * self.cutoff / TAU;
        if direct_cycles <= 48.0 || p.phi.beta() > 1.0 {
            return self.value_direct(r);
        }
        let rotated_cycles = self.rotated_phase_budget(r) / TAU;
        if direct_cycles <= rotated_cycles {
            self.value_direct(r)
        } else {
            self.value_rotated(r)
        }
    }

    /// Direct radial Fourier integral over `[0, P]`.
    fn value_direct(&self, r: f64) -> Result<f64> {
        let p = self.params;
        let edges = oscillation_edges(r, self.cutoff);
        let tol = QuadTol::new(1e-13, 1e-11);
        let v = match p.d {
            1 => integrate_panels(|rho| p.decay(rho) * (rho * r).cos(), &edges, tol)? / PI,
            2 => {
                integrate_panels(|rho| p.decay(rho) * bessel_j0(rho * r) * rho, &edges, tol)? / TAU
            }
            _ => {
                if r == 0.0 {
                    integrate_panels(|rho| p.decay(rho) * rho * rho, &edges, tol)? / (2.0 * PI * PI)
                } else {
                    integrate_panels(|rho| p.decay(rho) * rho * (rho * r).sin(), &edges, tol)?
                        / (2.0 * PI * PI * r)
                }
            }
        };
        Ok(v)
    }

    /// Contour-rotated representation, `Im exp(-t phi(i s))` against a
    /// decaying real factor.
    fn value_rotated(&self, r: f64) -> Result<f64> {
        let p = self.params;
        let edges = self.rotated_edges(r);
        let tol = QuadTol::new(1e-13, 1e-11);
        let im = |s: f64| p.decay_rotated(s).im;
        let v = match p.d {
            1 => -integrate_panels(|s| im(s) * (-r * s).exp(), &edges, tol)? / PI,
            2 => -integrate_panels(|s| im(s) * bessel_k0(r * s) * s, &edges, tol)? / (PI * PI),
            _ => {
                -integrate_panels(|s| im(s) * s * (-r * s).exp(), &edges, tol)?
                    / (2.0 * PI * PI * r)
            }
        };
        Ok(v)
    }

    /// Total phase accumulated along the rotated contour before the
    /// integrand dies, used to price the two representations.
    fn rotated_phase_budget(&self, r: f64) -> f64 {
        let p = self.params;
        // total decay exponent r s + t Re phi(i s), recovered from |e^{-t phi}|
        let exponent = |s: f64| r * s - p.decay_rotated(s).norm().max(1e-300).ln();
        let mut s = 1.0;
        while exponent(s) < 80.0 && s < 1e12 {
            s *= 2.0;
        }
        let z = Complex64::new(0.0, s);
        let phase = (z.powf(p.phi.beta()) / (z + p.phi.lambda()).ln().powf(p.phi.alpha())).im;
        (p.t * phase).abs()
    }

    fn rotated_edges(&self, r: f64) -> Vec<f64> {
        let p = self.params;
        let mut edges = vec![0.0];
        let mut s = (1e-6 / r).min(1e-6);
        loop {
            edges.push(s);
            let envelope = (-r * s).exp() * p.decay_rotated(s).norm();
            if (envelope < 1e-22 && edges.len() > 8) || s > 1e13 {
                break;
            }
            s *= 1.6;
        }
        edges
    }

    /// Total mass over `R^d`: head out to a fixed radius plus the exact
    /// contour-swapped tail.
    pub fn mass(&self) -> Result<f64> {
        let head_r = 10.0;
        let d = self.params.d;
        let surface = |r: f64| match d {
            1 => 2.0,
            2 => TAU * r,
            _ => 2.0 * TAU * r * r,
        };
        let head_edges = [
            0.0, 0.02, 0.05, 0.1, 0.2, 0.35, 0.6, 1.0, 1.6, 2.5, 4.0, 6.0, 8.0, head_r,
        ];
        let head = integrate_panels(
            |r| self.value(r).unwrap_or(f64::NAN) * surface(r),
            &head_edges,
            QuadTol::new(1e-10, 1e-9),
        )?;
        Ok(head + self.mass_tail(head_r)?)
    }

    /// Exact mass beyond radius `R`, obtained by integrating the rotated
    /// representation in `r` first.
    fn mass_tail(&self, big_r: f64) -> Result<f64> {
        let p = self.params;
        let im = |s: f64| p.decay_rotated(s).im;
        // graded edges into the s^{beta-1} endpoint, then geometric growth
        let mut edges = vec![0.0, 1e-12, 1e-9, 1e-7, 1e-5, 1e-4, 1e-3];
        let mut s = 2e-3;
        loop {
            edges.push(s);
            let envelope = (-big_r * s).exp() * p.decay_rotated(s).norm();
            if (envelope < 1e-22 && s > 1.0) || s > 1e13 {
                break;
            }
            s *= 1.5;
        }
        let tol = QuadTol::new(1e-12, 1e-10);
        let v = match p.d {
            1 => integrate_panels(|s| im(s) * (-s * big_r).exp() / s, &edges, tol)?,
            2 => integrate_panels(|s| im(s) * big_r * bessel_k1(s * big_r), &edges, tol)?,
            _ => integrate_panels(
                |s| im(s) * (-s * big_r).exp() * (big_r + 1.0 / s),
                &edges,
                tol,
            )?,
        };
        Ok(-2.0 / PI * v)
    }
}

/// Panel edges for the direct integral: half-periods of the oscillation up
/// to the cutoff, or plain geometric refinement when `r` is tiny.
fn oscillation_edges(r: f64, cutoff: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let half = if r > 0.0 { PI / r } else { f64::INFINITY };
    if half >= cutoff {
        // no full oscillation: resolve the decay profile geometrically
        let mut x = cutoff * 2f64.powi(-20);
        while x < cutoff {
            edges.push(x);
            x *= 2.0;
        }
    } else {
        let mut x = half;
        while x < cutoff {
            edges.push(x);
            x += half;
        }
    }
    edges.push(cutoff);
    edges
}

/// Finds a frequency cutoff `P` with certified tail mass below
/// [`CUTOFF_TOL`], reporting failure rather than truncating silently.
fn frequency_cutoff(params: &KernelParams) -> Result<(f64, f64)> {
    let mut p = 8.0;
    loop {
        let bound = tail_majorant(params, p)?;
        if bound < CUTOFF_TOL {
            // tighten back down a little so direct panels stay short
            let mut lo = p / 2.0;
            let mut hi = p;
            for _ in 0..8 {
                let mid = 0.5 * (lo + hi);
                if tail_majorant(params, mid)? < CUTOFF_TOL {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let bound = tail_majorant(params, hi)?;
            return Ok((hi, bound));
        }
        p *= 2.0;
        if p > CUTOFF_CAP {
            return Err(Error::QuadratureTail {
                cutoff: p,
                remainder: bound,
            });
        }
    }
}

/// Upper bound on the neglected frequency integral beyond `p`:
/// `c_d int_p^infty exp(-t phi(rho)) rho^{d-1} drho`, evaluated as a
/// positive integral out to where the integrand underflows.
fn tail_majorant(params: &KernelParams, p: f64) -> Result<f64> {
    let c = match params.d {
        1 => 1.0 / PI,
        2 => 1.0 / TAU,
        _ => 1.0 / (2.0 * PI * PI),
    };
    let dm1 = (params.d - 1) as i32;
    let f = |rho: f64| params.decay(rho) * rho.powi(dm1);
    let mut edges = vec![p];
    let mut x = p;
    loop {
        x *= 2.0;
        edges.push(x);
        if f(x) * x < 1e-40 {
            break;
        }
        if x > 1e15 {
            return Err(Error::QuadratureTail {
                cutoff: x,
                remainder: f(x) * x,
            });
        }
    }
    Ok(c * integrate_panels(f, &edges, QuadTol::new(1e-14, 1e-6))?)
}

/// Closed-form kernel for the pure transport symbol `|xi|` in one
/// dimension.
pub fn poisson_kernel_1d(t: f64, r: f64) -> f64 {
    t / (PI * (t * t + r * r))
}

/// Pointwise scan plus summary data for one parameter set.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub params_alpha: f64,
    pub params_beta: f64,
    pub params_lambda: f64,
    pub d: usize,
    pub t: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub mass: f64,
    pub min_value: f64,
    pub askey: AskeyReport,
    pub cutoff: f64,
    pub tail_bound: f64,
}

impl KernelReport {
    /// Header of the one-row-per-parameter-set summary table.
    pub fn csv_header() -> &'static str {
        "alpha,beta,lambda,d,t,mass,min_value,askey_phi1,askey_phi2,askey_phi3,first_violation_r"
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.params_alpha.to_string(),
            self.params_beta.to_string(),
            self.params_lambda.to_string(),
            self.d.to_string(),
            self.t.to_string(),
            self.mass.to_string(),
            self.min_value.to_string(),
            self.askey.d1_nonnegative.to_string(),
            self.askey.d2_nonpositive.to_string(),
            self.askey.d3_nonnegative.to_string(),
            self.askey
                .first_violation_r
                .map(|r| r.to_string())
                .unwrap_or_default(),
        ]
    }
}

/// Evaluates the kernel on the given radii and assembles the full report
/// (mass, minimum, derivative sign scan).
pub fn kernel_eval(params: KernelParams, radii: &[f64]) -> Result<KernelReport> {
    let ev = KernelEvaluator::new(params)?;
    let values: Vec<f64> = radii.iter().map(|&r| ev.value(r)).collect::<Result<_>>()?;
    let mass = ev.mass()?;
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let askey = askey_check(&params.phi, &default_askey_radii());
    Ok(KernelReport {
        params_alpha: params.phi.alpha(),
        params_beta: params.phi.beta(),
        params_lambda: params.phi.lambda(),
        d: params.d,
        t: params.t,
        radii: radii.to_vec(),
        values,
        mass,
        min_value,
        askey,
        cutoff: ev.cutoff(),
        tail_bound: ev.tail_bound(),
    })
}

/// Applies the discrete semigroup `exp(-tau L)` on the grid at the given
/// times and returns the `L^p` norms, which must be nonincreasing when the
/// kernel is positive with unit mass.
pub fn semigroup_contraction_probe(
    f0: &SpectralField,
    symbol: &MultiplierSymbol,
    times: &[f64],
    p: f64,
) -> Result<Vec<f64>> {
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        if t < 0.0 {
            return Err(Error::param("times", format!("{t} must be >= 0")));
        }
        let evolved = f0.map_coeffs(|(x1, x2), c| c * (-t * symbol.eval(x1, x2)).exp());
        norms.push(evolved.lp_norm(p)?);
    }
    Ok(norms)
}
