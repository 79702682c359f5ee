//! The radial symbol profile `phi(r) = r^beta / log^alpha(lambda + r)` and its
//! first three derivatives in closed form, plus the Askey-type sign checks
//! (`phi' >= 0`, `phi'' <= 0`, `phi''' >= 0`) that guarantee a positive
//! kernel in dimensions up to three.
//!
//! The closed forms group terms so that each summand has a definite sign in
//! the admissible regime; the reported `scale` fields sum their absolute
//! values, which lets sign tests use a cancellation-aware slack instead of a
//! meaningless absolute epsilon.

use crate::{Error, Result};

/// Relative slack used when testing derivative signs: a value is treated as
/// nonnegative when it exceeds `-SIGN_SLACK * scale`.
pub const SIGN_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct PhiParams {
    alpha: f64,
    beta: f64,
    lambda: f64,
}

impl PhiParams {
    /// Parameters in the range covered by the positivity analysis:
    /// `alpha >= 0`, `beta` in `(0, 1]`, `lambda > 1`.
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::param("beta", format!("{beta} not in (0, 1]")));
        }
        Self::exploratory(alpha, beta, lambda)
    }

    /// Extends the admissible range to `beta` in `(0, 2]`. Derivative
    /// formulas remain valid; the sign guarantees do not.
    pub fn exploratory(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("{alpha} must be >= 0")));
        }
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::param("beta", format!("{beta} not in (0, 2]")));
        }
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{lambda} must be > 1")));
        }
        Ok(PhiParams {
            alpha,
            beta,
            lambda,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The sufficient lower bound `exp((3 + 2 alpha) / beta)` on `lambda`
    /// under which all three sign conditions hold on `(0, infinity)`.
    pub fn threshold(&self) -> f64 {
        ((3.0 + 2.0 * self.alpha) / self.beta).exp()
    }

    /// Whether `lambda` meets the sufficient threshold.
    pub fn meets_threshold(&self) -> bool {
        self.lambda >= self.threshold()
    }

    pub fn phi(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        r.powf(self.beta) / (self.lambda + r).ln().powf(self.alpha)
    }

    /// Closed-form `phi` and its first three derivatives at `r > 0`.
    pub fn phi_derivatives(&self, r: f64) -> PhiDerivatives {
        assert!(r > 0.0, "derivatives need r > 0");
        let (a, b, la) = (self.alpha, self.beta, self.lambda);
        let l = (la + r).ln();
        let s = la + r;
        let phi = r.powf(b) / l.powf(a);

        // phi' = r^{b-1} / (s L^{a+1}) * (b la L + r (b L - a))
        let p1 = r.powf(b - 1.0) / (s * l.powf(a + 1.0));
        let d1_terms = [p1 * b * la * l, p1 * r * b * l, -p1 * r * a];
        let d1 = d1_terms.iter().sum();
        let d1_scale = d1_terms.iter().map(|t| t.abs()).sum();

        // phi'' groups into a pure-power piece and three log corrections.
        let d2_terms = [
            -b * (1.0 - b) * r.powf(b - 2.0) / l.powf(a),
            -2.0 * a * b * r.powf(b - 1.0) / (s * l.powf(a + 1.0)),
            a * r.powf(b) / (s * s * l.powf(a + 1.0)),
            a * (a + 1.0) * r.powf(b) / (s * s * l.powf(a + 2.0)),
        ];
        let d2 = d2_terms.iter().sum();
        let d2_scale = d2_terms.iter().map(|t| t.abs()).sum();

        // phi''' splits into four groups; the first three carry the factor
        // alpha and vanish in the pure-power case.
        let s3 = s * s * s;
        let q1 = a * (a + 1.0) * r.powf(b - 1.0) / (l.powf(a + 3.0) * s3);
        let q2 = a * r.powf(b) / (l.powf(a + 2.0) * s3);
        let q3 = a * r.powf(b - 2.0) / (l.powf(a + 1.0) * s3);
        let d3_terms = [
            q1 * 3.0 * la * b * l,
            q1 * r * 3.0 * b * l,
            -q1 * r * (2.0 + a),
            q2 * -3.0 * (1.0 + a),
            q2 * (-3.0 * b * b + 6.0 * b - 2.0) * l,
            q3 * la * b * (9.0 - 6.0 * b) * r,
            q3 * 3.0 * la * la * b * (1.0 - b),
            (2.0 - b) * (1.0 - b) * b * r.powf(b - 3.0) / l.powf(a),
        ];
        let d3 = d3_terms.iter().sum();
        let d3_scale = d3_terms.iter().map(|t| t.abs()).sum();

        PhiDerivatives {
            phi,
            d1,
            d2,
            d3,
            d1_scale,
            d2_scale,
            d3_scale,
        }
    }
}

/// Derivative values together with the summed magnitudes of their
/// constituent terms (for cancellation-aware sign tolerances).
#[derive(Clone, Copy, Debug)]
pub struct PhiDerivatives {
    pub phi: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d1_scale: f64,
    pub d2_scale: f64,
    pub d3_scale: f64,
}

/// Third derivative of `F(r) = exp(-t phi(r))` via the product expansion
/// `F''' = (-t phi''' + 3 t^2 phi' phi'' - t^3 (phi')^3) F`. Returns the
/// value and a magnitude scale for tolerance purposes.
pub fn decay_third_derivative(params: &PhiParams, t: f64, r: f64) -> (f64, f64) {
    let d = params.phi_derivatives(r);
    let f = (-t * d.phi).exp();
    let terms = [
        -t * d.d3,
        3.0 * t * t * d.d1 * d.d2,
        -t.powi(3) * d.d1.powi(3),
    ];
    let value = terms.iter().sum::<f64>() * f;
    let scale =
        (t * d.d3_scale + 3.0 * t * t * d.d1_scale * d.d2_scale + t.powi(3) * d.d1_scale.powi(3))
            * f;
    (value, scale)
}

/// Which derivative first breaks its sign condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignViolation {
    FirstNotIncreasing,
    SecondNotConcave,
    ThirdNotConvex,
}

/// Outcome of scanning the three sign conditions over a radius grid.
/// Each `*_first_violation` holds the smallest scanned radius at which that
/// particular condition fails.
#[derive(Clone, Debug)]
pub struct AskeyReport {
    pub d1_nonnegative: bool,
    pub d2_nonpositive: bool,
    pub d3_nonnegative: bool,
    pub d1_first_violation: Option<f64>,
    pub d2_first_violation: Option<f64>,
    pub d3_first_violation: Option<f64>,
    /// Smallest scanned radius at which any condition fails.
    pub first_violation_r: Option<f64>,
    pub first_violation: Option<SignViolation>,
}

impl AskeyReport {
    pub fn pass(&self) -> bool {
        self.d1_nonnegative && self.d2_nonpositive && self.d3_nonnegative
    }
}

/// Checks `phi' >= 0`, `phi'' <= 0`, `phi''' >= 0` at every radius, with a
/// slack proportional to the cancellation scale of each expression.
pub fn askey_check(params: &PhiParams, radii: &[f64]) -> AskeyReport {
    let mut report = AskeyReport {
        d1_nonnegative: true,
        d2_nonpositive: true,
        d3_nonnegative: true,
        d1_first_violation: None,
        d2_first_violation: None,
        d3_first_violation: None,
        first_violation_r: None,
        first_violation: None,
    };
    let record =
        |slot: &mut Option<f64>, overall: &mut Option<(f64, SignViolation)>, r: f64, kind| {
            if slot.is_none() {
                *slot = Some(r);
            }
            if overall.map_or(true, |(r0, _)| r < r0) {
                *overall = Some((r, kind));
            }
        };
    let mut overall: Option<(f64, SignViolation)> = None;
    for &r in radii {
        let d = params.phi_derivatives(r);
        if d.d1 < -SIGN_SLACK * d.d1_scale {
            report.d1_nonnegative = false;
            record(
                &mut report.d1_first_violation,
                &mut overall,
                r,
                SignViolation::FirstNotIncreasing,
            );
        }
        if d.d2 > SIGN_SLACK * d.d2_scale {
            report.d2_nonpositive = false;
            record(
                &mut report.d2_first_violation,
                &mut overall,
                r,
                SignViolation::SecondNotConcave,
            );
        }
        if d.d3 < -SIGN_SLACK * d.d3_scale {
            report.d3_nonnegative = false;
            record(
                &mut report.d3_first_violation,
                &mut overall,
                r,
                SignViolation::ThirdNotConvex,
            );
        }
    }
    if let Some((r, kind)) = overall {
        report.first_violation_r = Some(r);
        report.first_violation = Some(kind);
    }
    report
}

/// Geometric grid of `count` radii from `lo` to `hi` inclusive.
pub fn log_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (step * i as f64).exp()).collect()
}

/// The standard 200-point scan grid spanning `[1e-3, 1e6]`.
pub fn default_askey_radii() -> Vec<f64> {
    log_radii(1e-3, 1e6, 200)
}
