//! Adaptive Gauss-Kronrod quadrature and the Bessel evaluations the kernel
//! quadratures need (J0 by trapezoid over its integral representation, K0
//! and K1 by the cosh integral).

use crate::{Error, Result};

// 7-15 Gauss-Kronrod rule, positive abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Absolute and relative tolerance pair for adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64) -> Self {
        QuadTol { abs, rel }
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, (kron - gauss).abs() * h.abs())
}

const MAX_PANELS: usize = 20_000;

/// Integrates `f` over the consecutive panels defined by `edges`, bisecting
/// the worst panel until the summed error estimate meets the tolerance.
pub fn integrate_panels(f: impl Fn(f64) -> f64, edges: &[f64], tol: QuadTol) -> Result<f64> {
    assert!(edges.len() >= 2, "need at least one panel");
    // (error, a, b, value); a simple vec scan is fine at these sizes
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        panels.push((e, w[0], w[1], v));
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.3).sum();
        let err: f64 = panels.iter().map(|p| p.0).sum();
        let goal = tol.abs.max(tol.rel * total.abs());
        if err <= goal {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureConvergence { err, tol: goal });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .map(|(i, _)| i)
            .unwrap();
        let (_, a, b, _) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        panels.push((e1, a, m, v1));
        panels.push((e2, m, b, v2));
    }
}

/// Adaptive integral over a single interval.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: QuadTol) -> Result<f64> {
    integrate_panels(f, &[a, b], tol)
}

/// Bessel function of the first kind, order zero, via the trapezoid rule on
/// `(1/2pi) int_0^{2pi} cos(x sin theta) dtheta` (spectrally accurate for
/// this periodic analytic integrand).
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    let n = ((1.5 * x) as usize + 48).max(64);
    let h = std::f64::consts::TAU / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (x * (h * k as f64).sin()).cos();
    }
    sum / n as f64
}

fn bessel_k(nu: u32, x: f64) -> f64 {
    assert!(x > 0.0, "modified Bessel needs x > 0");
    // e^{-x cosh u} is below e^{-x} * 1e-19 once x (cosh u - 1) >= 45
    let u_max = (1.0 + 45.0 / x).acosh();
    let f = |u: f64| (-x * u.cosh()).exp() * (nu as f64 * u).cosh();
    let edges = [0.0, 0.25 * u_max, 0.5 * u_max, 0.75 * u_max, u_max];
    integrate_panels(f, &edges, QuadTol::new(1e-300, 1e-13))
        .expect("cosh-kernel integrand is smooth")
}

/// Modified Bessel function K0.
pub fn bessel_k0(x: f64) -> f64 {
    bessel_k(0, x)
}

/// Modified Bessel function K1.
pub fn bessel_k1(x: f64) -> f64 {
    bessel_k(1, x)
}
