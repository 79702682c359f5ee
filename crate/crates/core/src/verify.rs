//! Numerical verification of the operator inequalities: the dissipation
//! lower/upper bounds on dyadic blocks, the multiplier bounds for the
//! damped operator, and the commutator estimates for the logarithmic
//! Riesz transform.
//!
//! Each check measures a ratio whose boundedness the estimate asserts; a
//! check passes when every ratio stays below a configured ceiling. Ratios
//! are reported per case so refinement studies can track their drift.

use crate::dyadic::{build_filter_bank, BesovSpec};
use crate::field::SpectralField;
use crate::grid::Grid2D;
use crate::symbol::{apply_multiplier, log_dissipation_symbol, riesz_log_symbol};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One measured instance of an inequality.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub id: String,
    pub q: Option<i32>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Outcome of one inequality over a corpus.
#[derive(Clone, Debug)]
pub struct InequalityReport {
    pub name: String,
    pub params: String,
    pub ceiling: f64,
    pub cases: Vec<CaseResult>,
    pub max_ratio: f64,
    pub pass: bool,
}

impl InequalityReport {
    fn assemble(name: String, params: String, ceiling: f64, cases: Vec<CaseResult>) -> Self {
        let mut max_ratio = 0.0f64;
        let mut pass = true;
        for c in &cases {
            if !c.ratio.is_finite() {
                pass = false;
            } else {
                max_ratio = max_ratio.max(c.ratio);
            }
        }
        pass = pass && max_ratio <= ceiling;
        InequalityReport {
            name,
            params,
            ceiling,
            cases,
            max_ratio,
            pass,
        }
    }

    /// RFC 4180 rows, one per case, with the run fingerprint trailing.
    pub fn csv_string(&self, config_hash: &str, version: &str) -> String {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        wtr.write_record([
            "name",
            "case",
            "q",
            "lhs",
            "rhs",
            "ratio",
            "ceiling",
            "pass",
            "config_hash",
            "version",
        ])
        .expect("in-memory writer");
        for c in &self.cases {
            wtr.write_record([
                self.name.as_str(),
                c.id.as_str(),
                &c.q.map(|q| q.to_string()).unwrap_or_default(),
                &c.lhs.to_string(),
                &c.rhs.to_string(),
                &c.ratio.to_string(),
                &self.ceiling.to_string(),
                if self.pass { "true" } else { "false" },
                config_hash,
                version,
            ])
            .expect("in-memory writer");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory writer")).expect("utf8")
    }
}

fn block_weight(q: i32, alpha: f64, beta: f64) -> f64 {
    2.0f64.powf(beta * q as f64) * ((q.abs() + 1) as f64).powf(-alpha)
}

/// `int (L g) |g|^{p-2} g dx` evaluated pointwise on the grid.
pub fn dissipation_pairing(
    g: &SpectralField,
    alpha: f64,
    beta: f64,
    lambda: f64,
    p: f64,
) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("{p} must lie in (1, inf)")));
    }
    let sym = log_dissipation_symbol(alpha, beta, lambda)?;
    let lg = apply_multiplier(g, &sym);
    let area = g.grid().cell_area();
    let mut acc = 0.0;
    for (a, b) in lg.values().iter().zip(g.values()) {
        acc += a * b.abs().powf(p - 1.0) * b.signum() * area;
    }
    Ok(acc)
}

/// Spectral-side evaluation of the same pairing at `p = 2`.
pub fn dissipation_pairing_parseval(
    g: &SpectralField,
    alpha: f64,
    beta: f64,
    lambda: f64,
) -> Result<f64> {
    let sym = log_dissipation_symbol(alpha, beta, lambda)?;
    let grid = g.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x1, x2) = grid.freq_pair(i, j);
            let c = g.coeffs()[grid.idx(i, j)];
            acc += sym.eval(x1, x2) * c.norm_sqr();
        }
    }
    Ok(acc * grid.period() * grid.period())
}

/// Checks the two-sided dyadic dissipation estimate: for every block with
/// `q >= 0`,
/// `c 2^{q beta} (q+1)^{-alpha} ||D_q f||_p^p <= int (L D_q f)|D_q f|^{p-2} D_q f <= C 2^{q beta} (q+1)^{-alpha} ||D_q f||_p^p`.
///
/// Returns the lower-bound report (ratios `weight.norm^p / pairing`) and
/// the upper-bound report (ratios `pairing / (weight.norm^p)`).
pub fn check_generalized_bernstein(
    fields: &[(String, SpectralField)],
    alpha: f64,
    beta: f64,
    lambda: f64,
    p: f64,
    ceiling: f64,
) -> Result<(InequalityReport, InequalityReport)> {
    let params = format!("alpha={alpha} beta={beta} lambda={lambda:.6} p={p}");
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (id, f) in fields {
        let bank = build_filter_bank(f.grid())?;
        for q in 0..=bank.q_max() {
            let block = bank.dyadic_block(f, q)?;
            let norm = block.lp_norm(p)?;
            if norm < 1e-12 {
                continue;
            }
            let pairing = dissipation_pairing(&block, alpha, beta, lambda, p)?;
            let scaled = block_weight(q, alpha, beta) * norm.powf(p);
            lower.push(CaseResult {
                id: format!("{id}/q{q}"),
                q: Some(q),
                lhs: scaled,
                rhs: pairing,
                ratio: scaled / pairing,
            });
            upper.push(CaseResult {
                id: format!("{id}/q{q}"),
                q: Some(q),
                lhs: pairing,
                rhs: scaled,
                ratio: pairing / scaled,
            });
        }
    }
    Ok((
        InequalityReport::assemble(
            format!("dissipation_lower_p{p}"),
            params.clone(),
            ceiling,
            lower,
        ),
        InequalityReport::assemble(format!("dissipation_upper_p{p}"), params, ceiling, upper),
    ))
}

/// Checks the multiplier bound `||D_q L f||_p <= C 2^{q beta} (|q|+1)^{-alpha} ||D_q f||_p`
/// on blocks and its low-pass counterpart, for `lambda >= 2`.
pub fn check_multiplier_bernstein(
    fields: &[(String, SpectralField)],
    alpha: f64,
    beta: f64,
    lambda: f64,
    p: f64,
    ceiling: f64,
) -> Result<InequalityReport> {
    if !(lambda >= 2.0) {
        return Err(Error::param("lambda", format!("{lambda} must be >= 2")));
    }
    let sym = log_dissipation_symbol(alpha, beta, lambda)?;
    let params = format!("alpha={alpha} beta={beta} lambda={lambda:.6} p={p}");
    let mut cases = Vec::new();
    for (id, f) in fields {
        let bank = build_filter_bank(f.grid())?;
        let lf = apply_multiplier(f, &sym);
        for q in -1..=bank.q_max() {
            let weight = block_weight(q, alpha, beta);
            let base = bank.dyadic_block(f, q)?.lp_norm(p)?;
            if base >= 1e-12 {
                let lhs = bank.dyadic_block(&lf, q)?.lp_norm(p)?;
                let rhs = weight * base;
                cases.push(CaseResult {
                    id: format!("{id}/q{q}/block"),
                    q: Some(q),
                    lhs,
                    rhs,
                    ratio: lhs / rhs,
                });
            }
            if q >= 0 {
                let low = bank.low_pass(f, q)?.lp_norm(p)?;
                if low >= 1e-12 {
                    let lhs = bank.low_pass(&lf, q)?.lp_norm(p)?;
                    let rhs = weight * low;
                    cases.push(CaseResult {
                        id: format!("{id}/q{q}/lowpass"),
                        q: Some(q),
                        lhs,
                        rhs,
                        ratio: lhs / rhs,
                    });
                }
            }
        }
    }
    Ok(InequalityReport::assemble(
        format!("multiplier_bernstein_p{p}"),
        params,
        ceiling,
        cases,
    ))
}

fn frobenius_gradient(v: &(SpectralField, SpectralField)) -> Result<SpectralField> {
    let g11 = v.0.dx1();
    let g12 = v.0.dx2();
    let g21 = v.1.dx1();
    let g22 = v.1.dx2();
    let vals: Vec<f64> = (0..g11.values().len())
        .map(|k| {
            (g11.values()[k].powi(2)
                + g12.values()[k].powi(2)
                + g21.values()[k].powi(2)
                + g22.values()[k].powi(2))
            .sqrt()
        })
        .collect();
    SpectralField::from_values(v.0.grid(), vals)
}

fn advect(v: &(SpectralField, SpectralField), f: &SpectralField) -> Result<SpectralField> {
    let a = v.0.pointwise_mul(&f.dx1())?;
    let b = v.1.pointwise_mul(&f.dx2())?;
    Ok(a.add(&b)?.dealias())
}

/// `R_alpha(v . grad theta) - v . grad(R_alpha theta)` with the same
/// dealiased product on both sides, so a uniform velocity cancels exactly.
pub fn commutator_field(
    v: &(SpectralField, SpectralField),
    theta: &SpectralField,
    alpha: f64,
    lambda: f64,
) -> Result<SpectralField> {
    let riesz = riesz_log_symbol(alpha, lambda)?;
    let first = apply_multiplier(&advect(v, theta)?, &riesz);
    let second = advect(v, &apply_multiplier(theta, &riesz))?;
    first.sub(&second)
}

/// A velocity/scalar pair for the commutator corpus.
pub type CommutatorCase = (String, (SpectralField, SpectralField), SpectralField);

/// Checks the commutator estimates: with `g = [R_alpha, v.grad] theta`,
/// `||g||_{B^0_{p,r}} <= C ||grad v||_p (||theta||_{B^{0,alpha}_{inf,r}} + ||theta||_p)`
/// and, with `omega = curl v` and any `eps > 0`,
/// `||g||_{B^0_{p,r}} <= C (||omega||_inf + ||omega||_rho)(||theta||_{B^eps_{inf,r}} + ||theta||_rho)`.
pub fn check_commutator(
    pairs: &[CommutatorCase],
    alpha: f64,
    lambda: f64,
    p: f64,
    rho: f64,
    r: f64,
    eps_list: &[f64],
    ceiling: f64,
) -> Result<InequalityReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::param("p", format!("{p} must lie in [2, inf)")));
    }
    let params = format!("alpha={alpha} lambda={lambda:.6} p={p} rho={rho} r={r}");
    let mut cases = Vec::new();
    for (id, v, theta) in pairs {
        let div = v.0.dx1().add(&v.1.dx2())?.lp_norm(f64::INFINITY)?;
        let speed = v.0.lp_norm(f64::INFINITY)?.max(v.1.lp_norm(f64::INFINITY)?);
        if div > 1e-10 * (1.0 + speed) {
            return Err(Error::param(
                "velocity",
                format!("case {id}: divergence defect {div:.3e}"),
            ));
        }
        let bank = build_filter_bank(theta.grid())?;
        let g = commutator_field(v, theta, alpha, lambda)?;
        let lhs = bank.besov_norm(&g, &BesovSpec::new(0.0, 0.0, p, r)?)?;
        let grad_p = frobenius_gradient(v)?.lp_norm(p)?;
        let theta_log = bank.besov_norm(theta, &BesovSpec::new(0.0, alpha, f64::INFINITY, r)?)?;
        let rhs1 = grad_p * (theta_log + theta.lp_norm(p)?);
        cases.push(CaseResult {
            id: format!("{id}/gradient"),
            q: None,
            lhs,
            rhs: rhs1,
            ratio: if lhs == 0.0 { 0.0 } else { lhs / rhs1 },
        });
        let omega = v.1.dx1().sub(&v.0.dx2())?;
        let omega_part = omega.lp_norm(f64::INFINITY)? + omega.lp_norm(rho)?;
        for &eps in eps_list {
            let theta_eps = bank.besov_norm(theta, &BesovSpec::new(eps, 0.0, f64::INFINITY, r)?)?;
            let rhs2 = omega_part * (theta_eps + theta.lp_norm(rho)?);
            cases.push(CaseResult {
                id: format!("{id}/vorticity_eps{eps}"),
                q: None,
                lhs,
                rhs: rhs2,
                ratio: if lhs == 0.0 { 0.0 } else { lhs / rhs2 },
            });
        }
    }
    Ok(InequalityReport::assemble(
        "riesz_commutator".to_string(),
        params,
        ceiling,
        cases,
    ))
}

/// Parameters of a verification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub ceiling: f64,
    pub p_list: Vec<f64>,
    pub commutator_p: f64,
    pub commutator_rho: f64,
    pub besov_r: f64,
    pub eps_list: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 128,
            seed: 7,
            alpha: 1.0,
            beta: 1.0,
            lambda: 4.0f64.exp(),
            ceiling: 1e3,
            p_list: vec![1.5, 2.0, 4.0],
            commutator_p: 2.0,
            commutator_rho: 4.0,
            besov_r: 1.0,
            eps_list: vec![0.1, 0.3, 0.5],
        }
    }
}

/// Zeroes every coefficient with `|xi| > cut`.
pub fn sharp_band_limit(f: &SpectralField, cut: f64) -> SpectralField {
    f.map_coeffs(|(x1, x2), c| {
        if x1.hypot(x2) <= cut {
            c
        } else {
            Complex64::default()
        }
    })
}

/// Scalar test fields, spectrally confined to the resolved dyadic range.
pub fn standard_corpus(grid: Grid2D, seed: u64) -> Result<Vec<(String, SpectralField)>> {
    let bank = build_filter_bank(grid)?;
    let top = 2.0f64.powi(bank.q_max());
    let mut corpus = Vec::new();
    for q in 0..=bank.q_max() {
        let k = 1i64 << q;
        let f = SpectralField::from_modes(grid, &[(k, 0, Complex64::new(0.0, -0.5))])?;
        corpus.push((format!("mode_q{q}"), f));
    }
    corpus.push((
        "random_full".to_string(),
        crate::evolve::random_band_limited(grid, seed, 1.0, top, 1.0, true)?,
    ));
    corpus.push((
        "random_rough".to_string(),
        crate::evolve::random_band_limited(grid, seed.wrapping_add(1), top / 4.0, top, 1.0, true)?,
    ));
    let bump = crate::evolve::gaussian_bump(grid, 2.8, 3.4, 0.7, 1.0);
    corpus.push(("bump".to_string(), sharp_band_limit(&bump, top)));
    let ridge = SpectralField::from_fn(grid, |x, y| (3.0 * x).sin() * (0.5 + (y.cos()).powi(2)));
    corpus.push(("ridge".to_string(), sharp_band_limit(&ridge, top)));
    Ok(corpus)
}

/// Divergence-free velocity from a random band-limited stream function.
pub fn random_velocity(grid: Grid2D, seed: u64) -> Result<(SpectralField, SpectralField)> {
    let psi = crate::evolve::random_band_limited(grid, seed, 1.0, 8.0, 1.0, true)?;
    Ok((psi.dx2(), psi.dx1().scale(-1.0)))
}

/// Velocity/scalar pairs exercising the commutator bounds.
pub fn commutator_corpus(grid: Grid2D, seed: u64) -> Result<Vec<CommutatorCase>> {
    let bank = build_filter_bank(grid)?;
    let top = 2.0f64.powi(bank.q_max());
    let mut pairs = Vec::new();
    let theta_a =
        crate::evolve::random_band_limited(grid, seed.wrapping_add(10), 1.0, top, 1.0, true)?;
    pairs.push((
        "random_flow".to_string(),
        random_velocity(grid, seed.wrapping_add(11))?,
        theta_a,
    ));
    let shear = (
        SpectralField::from_fn(grid, |_, y| y.sin()),
        SpectralField::zeros(grid),
    );
    let bump = sharp_band_limit(&crate::evolve::gaussian_bump(grid, 3.1, 2.6, 0.8, 1.0), top);
    pairs.push(("shear_bump".to_string(), shear, bump));
    let cellular = (
        SpectralField::from_fn(grid, |x, y| x.sin() * y.cos()),
        SpectralField::from_fn(grid, |x, y| -x.cos() * y.sin()),
    );
    let rough =
        crate::evolve::random_band_limited(grid, seed.wrapping_add(12), top / 4.0, top, 1.0, true)?;
    pairs.push(("cellular_rough".to_string(), cellular, rough));
    Ok(pairs)
}

/// Runs every inequality check over the standard corpora.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<InequalityReport>> {
    let grid = Grid2D::new(config.n)?;
    let fields = standard_corpus(grid, config.seed)?;
    let mut reports = Vec::new();
    for &p in &config.p_list {
        let (lower, upper) = check_generalized_bernstein(
            &fields,
            config.alpha,
            config.beta,
            config.lambda,
            p,
            config.ceiling,
        )?;
        reports.push(lower);
        reports.push(upper);
        reports.push(check_multiplier_bernstein(
            &fields,
            config.alpha,
            config.beta,
            config.lambda,
            p,
            config.ceiling,
        )?);
    }
    let pairs = commutator_corpus(grid, config.seed)?;
    reports.push(check_commutator(
        &pairs,
        config.alpha,
        config.lambda,
        config.commutator_p,
        config.commutator_rho,
        config.besov_r,
        &config.eps_list,
        config.ceiling,
    )?);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::log_damped_ratio;

    const LAMBDA: f64 = 54.598150033144236; // e^4

    #[test]
    fn pairing_matches_parseval_at_p2() {
        let grid = Grid2D::new(64).unwrap();
        let f = crate::evolve::random_band_limited(grid, 3, 1.0, 8.0, 1.0, true).unwrap();
        let a = dissipation_pairing(&f, 1.0, 1.0, LAMBDA, 2.0).unwrap();
        let b = dissipation_pairing_parseval(&f, 1.0, 1.0, LAMBDA).unwrap();
        assert!(
            (a - b).abs() <= 1e-8 * b.abs(),
            "pointwise {a} vs spectral {b}"
        );
        assert!(b > 0.0);
    }

    #[test]
    fn pairing_is_nonnegative_for_many_fields() {
        let grid = Grid2D::new(64).unwrap();
        for seed in 0..6u64 {
            let f = crate::evolve::random_band_limited(grid, seed, 1.0, 10.0, 1.0, true).unwrap();
            for p in [1.5, 2.0, 3.0, 6.0] {
                let val = dissipation_pairing(&f, 1.0, 1.0, LAMBDA, p).unwrap();
                let scale = f.lp_norm(p).unwrap().powf(p);
                assert!(val >= -1e-10 * scale, "p={p} seed={seed} pairing {val}");
            }
        }
    }

    #[test]
    fn dissipation_bounds_hold_on_corpus() {
        let grid = Grid2D::new(128).unwrap();
        let fields = standard_corpus(grid, 5).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let (lower, upper) =
                check_generalized_bernstein(&fields, 1.0, 1.0, LAMBDA, p, 1e3).unwrap();
            assert!(lower.pass, "lower p={p} max ratio {}", lower.max_ratio);
            assert!(upper.pass, "upper p={p} max ratio {}", upper.max_ratio);
            assert!(!lower.cases.is_empty());
        }
    }

    #[test]
    fn multiplier_bound_matches_single_mode_exactly() {
        let grid = Grid2D::new(128).unwrap();
        let fields = standard_corpus(grid, 5).unwrap();
        let report = check_multiplier_bernstein(&fields, 1.0, 1.0, LAMBDA, 2.0, 1e3).unwrap();
        assert!(report.pass, "max ratio {}", report.max_ratio);
        for q in 0..=4 {
            let rho = 2.0f64.powi(q);
            let want = log_damped_ratio(rho, 1.0, 1.0, LAMBDA) * (q + 1) as f64 / rho;
            let case = report
                .cases
                .iter()
                .find(|c| c.id == format!("mode_q{q}/q{q}/block"))
                .unwrap();
            assert!(
                (case.ratio - want).abs() <= 1e-8 * want,
                "q={q}: ratio {} want {want}",
                case.ratio
            );
        }
    }

    #[test]
    fn uniform_velocity_commutes_exactly() {
        let grid = Grid2D::new(64).unwrap();
        let theta = crate::evolve::random_band_limited(grid, 9, 1.0, 8.0, 1.0, true).unwrap();
        let v = (
            SpectralField::from_fn(grid, |_, _| 0.7),
            SpectralField::from_fn(grid, |_, _| -0.4),
        );
        let g = commutator_field(&v, &theta, 1.0, LAMBDA).unwrap();
        assert!(g.lp_norm(f64::INFINITY).unwrap() <= 1e-12);
    }

    #[test]
    fn commutator_bounds_hold_on_corpus() {
        let grid = Grid2D::new(128).unwrap();
        let pairs = commutator_corpus(grid, 5).unwrap();
        let report =
            check_commutator(&pairs, 1.0, LAMBDA, 2.0, 4.0, 1.0, &[0.1, 0.3, 0.5], 1e3).unwrap();
        assert!(report.pass, "max ratio {}", report.max_ratio);
        assert_eq!(report.cases.len(), 3 * 4);
        for c in &report.cases {
            assert!(c.ratio >= 0.0 && c.ratio.is_finite());
        }
    }

    #[test]
    fn non_solenoidal_velocity_is_rejected() {
        let grid = Grid2D::new(64).unwrap();
        let theta = crate::evolve::gaussian_bump(grid, 3.0, 3.0, 0.8, 1.0);
        let bad = (
            SpectralField::from_fn(grid, |x, _| x.sin()),
            SpectralField::zeros(grid),
        );
        let err = check_commutator(
            &[("bad".to_string(), bad, theta)],
            1.0,
            LAMBDA,
            2.0,
            4.0,
            1.0,
            &[0.1],
            1e3,
        );
        assert!(matches!(err, Err(Error::Param { .. })));
    }

    #[test]
    fn zero_field_yields_no_cases() {
        let grid = Grid2D::new(128).unwrap();
        let fields = vec![("null".to_string(), SpectralField::zeros(grid))];
        let (lower, _) = check_generalized_bernstein(&fields, 1.0, 1.0, LAMBDA, 2.0, 1e3).unwrap();
        assert!(lower.cases.is_empty());
        assert!(lower.pass);
        assert_eq!(lower.max_ratio, 0.0);
    }

    #[test]
    fn suite_is_deterministic() {
        let config = SuiteConfig {
            n: 64,
            p_list: vec![2.0],
            ..Default::default()
        };
        let a = run_suite(&config).unwrap();
        let b = run_suite(&config).unwrap();
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(
                ra.csv_string("abc123", "0.1.0"),
                rb.csv_string("abc123", "0.1.0")
            );
        }
    }

    #[test]
    fn report_csv_shape() {
        let report = InequalityReport::assemble(
            "demo".to_string(),
            "p=2".to_string(),
            10.0,
            vec![CaseResult {
                id: "one".to_string(),
                q: Some(3),
                lhs: 1.5,
                rhs: 3.0,
                ratio: 0.5,
            }],
        );
        let csv = report.csv_string("deadbeef0123", "0.1.0");
        let mut lines = csv.split("\r\n");
        assert_eq!(
            lines.next().unwrap(),
            "name,case,q,lhs,rhs,ratio,ceiling,pass,config_hash,version"
        );
        assert_eq!(
            lines.next().unwrap(),
            "demo,one,3,1.5,3,0.5,10,true,deadbeef0123,0.1.0"
        );
        assert!(report.pass);
    }
}
