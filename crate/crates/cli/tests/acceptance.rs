//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Tolerances are pinned here, not configurable.

use logbouss_core::dyadic::{build_filter_bank, BesovSpec};
use logbouss_core::evolve::{
    gaussian_bump, random_band_limited, run_boussinesq, run_td, sup_speed, taylor_green_vorticity,
    BoussinesqProblem, DissipationSpec, MonitorSpec, TDProblem, TrajectoryLog, Velocity,
};
use logbouss_core::kernel::{poisson_kernel_1d, KernelEvaluator, KernelParams};
use logbouss_core::phi::{askey_check, log_radii, PhiParams};
use logbouss_core::symbol::biot_savart;
use logbouss_core::verify::{
    check_commutator, check_generalized_bernstein, check_multiplier_bernstein, commutator_field,
    dissipation_pairing, dissipation_pairing_parseval, sharp_band_limit, CommutatorCase,
};
use logbouss_core::{Grid2D, SpectralField};
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Mutex;
use std::time::Instant;

const MASS_TOL: f64 = 1e-6;
const POSITIVITY_FLOOR: f64 = -1e-8;
const POISSON_TOL: f64 = 1e-4;
const FD_TOL: f64 = 1e-6;
const MAX_PRINCIPLE_TOL: f64 = 1e-6;
const RATIO_CEILING: f64 = 1e3;
const DRIFT_TOL: f64 = 0.25;
const PARSEVAL_TOL: f64 = 1e-8;
const SINGLE_MODE_TOL: f64 = 1e-8;
const CONST_V_TOL: f64 = 1e-12;
const EULER_DRIFT_TOL: f64 = 1e-5;
// the grid sup of a translating field fluctuates at O((k dx)^2 / 8) as the
// extremum crosses cells, about 2e-3 at n = 256; 1e-5 sup conservation is
// only meaningful when the extrema are stationary, so the moving-data run
// gets a sampling-floor gate instead
const EULER_MOVING_SUP_TOL: f64 = 5e-3;
const RESIDUAL_DECREASE: f64 = 2.0;
const DEGENERATE_RESIDUAL: f64 = 1e-10;
const SMOOTHING_CEILING: f64 = 1e3;

// timed criteria need exclusive use of the machine, so run everything in
// sequence regardless of the harness thread count
static GATE: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(k: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {k:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {k} {name}: {detail}");
}

fn matrix() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for alpha in [0.0f64, 0.5, 1.0] {
        for beta in [0.5f64, 1.0] {
            out.push((alpha, beta, ((3.0 + 2.0 * alpha) / beta).exp()));
        }
    }
    out
}

fn kernel_cases() -> Vec<(f64, f64, f64, usize, f64)> {
    let mut out = Vec::new();
    for (alpha, beta, lambda) in matrix() {
        for d in [1, 2, 3] {
            for t in [0.5, 1.0, 2.0] {
                out.push((alpha, beta, lambda, d, t));
            }
        }
    }
    out
}

#[test]
fn criterion_01_kernel_mass() {
    let _g = serial();
    let start = Instant::now();
    let worst = kernel_cases()
        .par_iter()
        .map(|&(a, b, l, d, t)| {
            let params = KernelParams::new(PhiParams::new(a, b, l).unwrap(), t, d).unwrap();
            let mass = KernelEvaluator::new(params).unwrap().mass().unwrap();
            (mass - 1.0).abs()
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= MASS_TOL && elapsed < 120.0;
    verdict(
        1,
        "kernel_mass",
        pass,
        &format!("54 cases, worst |mass-1| = {worst:.3e}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_02_kernel_positivity() {
    let _g = serial();
    let radii: Vec<f64> = (0..=50).map(|k| k as f64 * 0.2).collect();
    let global_min = kernel_cases()
        .par_iter()
        .map(|&(a, b, l, d, t)| {
            let params = KernelParams::new(PhiParams::new(a, b, l).unwrap(), t, d).unwrap();
            let ev = KernelEvaluator::new(params).unwrap();
            radii
                .iter()
                .map(|&r| ev.value(r).unwrap())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);

    let mut poisson_dev = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let params =
            KernelParams::new(PhiParams::new(0.0, 1.0, 3.0f64.exp()).unwrap(), t, 1).unwrap();
        let ev = KernelEvaluator::new(params).unwrap();
        for &r in &radii {
            let exact = poisson_kernel_1d(t, r);
            poisson_dev = poisson_dev.max((ev.value(r).unwrap() - exact).abs() / exact);
        }
    }
    let pass = global_min >= POSITIVITY_FLOOR && poisson_dev <= POISSON_TOL;
    verdict(
        2,
        "kernel_positivity",
        pass,
        &format!("global min = {global_min:.3e}, poisson max rel dev = {poisson_dev:.3e}"),
    );
}

fn central_richardson(f: impl Fn(f64) -> f64, r: f64) -> f64 {
    let diff = |h: f64| (f(r + h) - f(r - h)) / (2.0 * h);
    let h = 1e-2 * r;
    (4.0 * diff(h / 2.0) - diff(h)) / 3.0
}

#[test]
fn criterion_03_askey_signs() {
    let _g = serial();
    let radii = log_radii(1e-3, 1e6, 200);
    let fd_radii = log_radii(1e-2, 1e3, 24);
    let mut all_pass = true;
    let mut worst_fd = 0.0f64;
    for (alpha, beta, lambda) in matrix() {
        let params = PhiParams::new(alpha, beta, lambda).unwrap();
        let report = askey_check(&params, &radii);
        all_pass &= report.d1_nonnegative && report.d2_nonpositive && report.d3_nonnegative;
        for &r in &fd_radii {
            let d = params.phi_derivatives(r);
            let fd1 = central_richardson(|x| params.phi(x), r);
            let fd2 = central_richardson(|x| params.phi_derivatives(x).d1, r);
            let fd3 = central_richardson(|x| params.phi_derivatives(x).d2, r);
            // normalize by the natural scale of each derivative so the
            // identically-zero higher derivatives of phi(r) = r stay finite
            worst_fd = worst_fd
                .max((fd1 - d.d1).abs() / (d.d1.abs() + d.phi / r))
                .max((fd2 - d.d2).abs() / (d.d2.abs() + d.phi / (r * r)))
                .max((fd3 - d.d3).abs() / (d.d3.abs() + d.phi / (r * r * r)));
        }
    }
    let pass = all_pass && worst_fd <= FD_TOL;
    verdict(
        3,
        "askey_signs",
        pass,
        &format!("signs hold on 200 radii for 6 parameter sets, worst fd dev = {worst_fd:.3e}"),
    );
}

#[test]
fn criterion_04_maximum_principle() {
    let _g = serial();
    let grid = Grid2D::new(256).unwrap();
    let dissipation = DissipationSpec::new(1.0, 1.0, 1.0, 5.0f64.exp()).unwrap();
    let monitor = MonitorSpec {
        p_list: vec![1.0, 2.0, 4.0, f64::INFINITY],
        block_p: 2.0,
        smoothing_alpha: 1.0,
        smoothing_beta: 1.0,
        sample_every: 10,
    };
    let mut pass = true;
    let mut detail = String::new();
    for (name, velocity) in [
        ("shear", Velocity::Shear { amplitude: 1.0 }),
        ("taylor-green", Velocity::TaylorGreen { amplitude: 1.0 }),
    ] {
        let theta0 = gaussian_bump(grid, 2.8, 3.2, 0.7, 1.0);
        let problem = TDProblem::new(theta0, velocity, dissipation).unwrap();
        let dt = 0.45 * grid.dx();
        let start = Instant::now();
        let log = run_td(&problem, dt, 500, monitor.clone()).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let mut worst = 0.0f64;
        for rows in log.theta_lp.windows(2) {
            for i in 0..rows[0].len() {
                worst = worst.max((rows[1][i] - rows[0][i]) / rows[0][i]);
            }
        }
        pass &= worst <= MAX_PRINCIPLE_TOL && elapsed < 60.0;
        detail.push_str(&format!(
            "{name}: worst growth {worst:.2e} in {elapsed:.1}s; "
        ));
    }
    verdict(4, "maximum_principle", pass, detail.trim_end_matches("; "));
}

/// The criterion-1 matrix fields rebuilt with a fixed spectral band, so
/// refining the grid changes only the discretization.
fn capped_corpus(grid: Grid2D, seed: u64, top: f64) -> Vec<(String, SpectralField)> {
    let q_top = (top.log2()).round() as i32;
    let mut corpus = Vec::new();
    for q in 0..=q_top {
        let k = 1i64 << q;
        let f = SpectralField::from_modes(grid, &[(k, 0, Complex64::new(0.0, -0.5))]).unwrap();
        corpus.push((format!("mode_q{q}"), f));
    }
    corpus.push((
        "random_full".to_string(),
        random_band_limited(grid, seed, 1.0, top, 1.0, true).unwrap(),
    ));
    corpus.push((
        "random_rough".to_string(),
        random_band_limited(grid, seed + 1, top / 4.0, top, 1.0, true).unwrap(),
    ));
    corpus.push((
        "bump".to_string(),
        sharp_band_limit(&gaussian_bump(grid, 2.8, 3.4, 0.7, 1.0), top),
    ));
    corpus
}

const LAMBDA_E4: f64 = 54.598150033144236;

#[test]
fn criterion_05_generalized_bernstein() {
    let _g = serial();
    let top = 32.0;
    let grids = [Grid2D::new(256).unwrap(), Grid2D::new(512).unwrap()];
    let mut max_lower = [0.0f64; 2];
    let mut max_upper = [0.0f64; 2];
    let mut finite = true;
    for (i, &grid) in grids.iter().enumerate() {
        let corpus = capped_corpus(grid, 7, top);
        for p in [1.5, 2.0, 4.0] {
            let (lower, upper) =
                check_generalized_bernstein(&corpus, 1.0, 1.0, LAMBDA_E4, p, RATIO_CEILING)
                    .unwrap();
            finite &= lower.pass && upper.pass;
            max_lower[i] = max_lower[i].max(lower.max_ratio);
            max_upper[i] = max_upper[i].max(upper.max_ratio);
        }
    }
    let drift_lower = (max_lower[1] / max_lower[0] - 1.0).abs();
    let drift_upper = (max_upper[1] / max_upper[0] - 1.0).abs();

    let mut parseval_gap = 0.0f64;
    let corpus = capped_corpus(grids[0], 7, top);
    let bank = build_filter_bank(grids[0]).unwrap();
    for (_, f) in &corpus {
        for q in 0..=bank.q_max() {
            let block = bank.dyadic_block(f, q).unwrap();
            if block.lp_norm(2.0).unwrap() < 1e-12 {
                continue;
            }
            let a = dissipation_pairing(&block, 1.0, 1.0, LAMBDA_E4, 2.0).unwrap();
            let b = dissipation_pairing_parseval(&block, 1.0, 1.0, LAMBDA_E4).unwrap();
            parseval_gap = parseval_gap.max((a - b).abs() / b.abs());
        }
    }
    let pass = finite
        && drift_lower < DRIFT_TOL
        && drift_upper < DRIFT_TOL
        && parseval_gap <= PARSEVAL_TOL;
    verdict(
        5,
        "generalized_bernstein",
        pass,
        &format!(
            "max ratios {:.3e}/{:.3e} (lower n256/n512, drift {:.1}%), parseval gap {:.2e}",
            max_lower[0],
            max_lower[1],
            drift_lower * 100.0,
            parseval_gap
        ),
    );
}

#[test]
fn criterion_06_multiplier_bernstein() {
    let _g = serial();
    let top = 32.0;
    let grids = [Grid2D::new(256).unwrap(), Grid2D::new(512).unwrap()];
    let mut closed_form_dev = 0.0f64;
    let mut max_ratio = [0.0f64; 2];
    let mut finite = true;
    for (i, &grid) in grids.iter().enumerate() {
        let corpus = capped_corpus(grid, 7, top);
        let report =
            check_multiplier_bernstein(&corpus, 1.0, 1.0, LAMBDA_E4, 2.0, RATIO_CEILING).unwrap();
        finite &= report.pass;
        max_ratio[i] = report.max_ratio;
        if i == 0 {
            for q in 0..=5 {
                let rho = 2.0f64.powi(q);
                let want = (q as f64 + 1.0) / (LAMBDA_E4 + rho).ln();
                let case = report
                    .cases
                    .iter()
                    .find(|c| c.id == format!("mode_q{q}/q{q}/block"))
                    .unwrap();
                closed_form_dev = closed_form_dev.max((case.ratio - want).abs() / want);
            }
        }
    }
    let drift = (max_ratio[1] / max_ratio[0] - 1.0).abs();
    let pass = finite && closed_form_dev <= SINGLE_MODE_TOL && drift < DRIFT_TOL;
    verdict(
        6,
        "multiplier_bernstein",
        pass,
        &format!(
            "single-mode dev {closed_form_dev:.2e}, max ratio {:.3e}, drift {:.1}%",
            max_ratio[0],
            drift * 100.0
        ),
    );
}

fn commutator_pairs(grid: Grid2D, top: f64) -> Vec<CommutatorCase> {
    let psi = random_band_limited(grid, 18, 1.0, 8.0, 1.0, true).unwrap();
    let flow = (psi.dx2(), psi.dx1().scale(-1.0));
    let theta_a = random_band_limited(grid, 17, 1.0, top, 1.0, true).unwrap();
    let shear = (
        SpectralField::from_fn(grid, |_, y| y.sin()),
        SpectralField::zeros(grid),
    );
    let bump = sharp_band_limit(&gaussian_bump(grid, 3.1, 2.6, 0.8, 1.0), top);
    let cellular = (
        SpectralField::from_fn(grid, |x, y| x.sin() * y.cos()),
        SpectralField::from_fn(grid, |x, y| -x.cos() * y.sin()),
    );
    let rough = random_band_limited(grid, 19, top / 4.0, top, 1.0, true).unwrap();
    vec![
        ("random_flow".to_string(), flow, theta_a),
        ("shear_bump".to_string(), shear, bump),
        ("cellular_rough".to_string(), cellular, rough),
    ]
}

#[test]
fn criterion_07_commutator() {
    let _g = serial();
    let grid = Grid2D::new(256).unwrap();
    let theta = random_band_limited(grid, 23, 1.0, 8.0, 1.0, true).unwrap();
    let v = (
        SpectralField::from_fn(grid, |_, _| 0.7),
        SpectralField::from_fn(grid, |_, _| -0.4),
    );
    let g = commutator_field(&v, &theta, 1.0, LAMBDA_E4).unwrap();
    let bank = build_filter_bank(grid).unwrap();
    let const_lhs = bank
        .besov_norm(&g, &BesovSpec::new(0.0, 0.0, 2.0, 1.0).unwrap())
        .unwrap();

    let top = 32.0;
    let mut max_ratio = [0.0f64; 2];
    let mut finite = true;
    for (i, n) in [256, 512].into_iter().enumerate() {
        let grid = Grid2D::new(n).unwrap();
        let report = check_commutator(
            &commutator_pairs(grid, top),
            1.0,
            LAMBDA_E4,
            2.0,
            4.0,
            1.0,
            &[0.1, 0.3, 0.5],
            RATIO_CEILING,
        )
        .unwrap();
        finite &= report.pass;
        max_ratio[i] = report.max_ratio;
    }
    let drift = (max_ratio[1] / max_ratio[0] - 1.0).abs();
    let pass = const_lhs <= CONST_V_TOL && finite && drift < DRIFT_TOL;
    verdict(
        7,
        "commutator",
        pass,
        &format!(
            "uniform-velocity lhs {const_lhs:.2e}, max ratio {:.3e}, drift {:.1}%",
            max_ratio[0],
            drift * 100.0
        ),
    );
}

fn euler_drifts(omega0: SpectralField, cfl: f64) -> (f64, f64, usize) {
    let grid = omega0.grid();
    let theta0 = SpectralField::zeros(grid);
    let problem = BoussinesqProblem::new(omega0, theta0, 0.4, 5.0f64.exp(), 1.0).unwrap();
    let vmax = sup_speed(&biot_savart(&problem.omega0).unwrap());
    let dt = cfl * grid.dx() / vmax;
    let steps = (5.0 / dt).ceil() as usize;
    let monitor = MonitorSpec {
        p_list: vec![2.0, f64::INFINITY],
        block_p: 2.0,
        smoothing_alpha: 0.4,
        smoothing_beta: 1.0,
        sample_every: 25,
    };
    let log = run_boussinesq(&problem, dt, steps, monitor).unwrap();
    let l2_0 = log.omega_lp[0][0];
    let inf_0 = log.omega_lp[0][1];
    let mut drift_l2 = 0.0f64;
    let mut drift_inf = 0.0f64;
    for row in &log.omega_lp {
        drift_l2 = drift_l2.max((row[0] - l2_0).abs() / l2_0);
        drift_inf = drift_inf.max((row[1] - inf_0).abs() / inf_0);
    }
    (drift_l2, drift_inf, steps)
}

#[test]
fn criterion_08_euler_limit() {
    let _g = serial();
    let grid = Grid2D::new(256).unwrap();
    // Taylor-Green is a steady Euler solution, so both norms must hold still;
    // the random band-limited field actually moves and exercises advection,
    // where the sup norm can only be tracked down to the sampling floor
    let (steady_l2, steady_inf, _) = euler_drifts(taylor_green_vorticity(grid, 1.0), 0.3);
    let (moving_l2, moving_inf, steps) = euler_drifts(
        random_band_limited(grid, 7, 2.0, 8.0, 1.0, true).unwrap(),
        0.1,
    );
    let pass = steady_l2 <= EULER_DRIFT_TOL
        && steady_inf <= EULER_DRIFT_TOL
        && moving_l2 <= EULER_DRIFT_TOL
        && moving_inf <= EULER_MOVING_SUP_TOL;
    verdict(
        8,
        "euler_limit",
        pass,
        &format!(
            "steady drift l2 {steady_l2:.2e} sup {steady_inf:.2e}; moving ({steps} steps) \
             enstrophy drift {moving_l2:.2e}, sup sampling fluctuation {moving_inf:.2e}"
        ),
    );
}

fn reference_run(n: usize, t_final: f64, sample_every: usize) -> TrajectoryLog {
    let grid = Grid2D::new(n).unwrap();
    let omega0 = taylor_green_vorticity(grid, 1.0);
    let theta0 = gaussian_bump(grid, 3.5, 3.0, 0.9, 0.5);
    let problem = BoussinesqProblem::new(omega0, theta0, 0.4, 5.0f64.exp(), 1.0).unwrap();
    let dt = 0.4 * grid.dx();
    let steps = (t_final / dt).ceil() as usize;
    let monitor = MonitorSpec {
        p_list: vec![2.0, f64::INFINITY],
        block_p: 2.0,
        smoothing_alpha: 0.4,
        smoothing_beta: 1.0,
        sample_every,
    };
    run_boussinesq(&problem, dt, steps, monitor).unwrap()
}

#[test]
fn criterion_09_gamma_residual() {
    let _g = serial();
    let max_resid = |log: &TrajectoryLog| {
        log.gamma_residual
            .iter()
            .fold(0.0f64, |m, &(_, r)| m.max(r))
    };
    let coarse = max_resid(&reference_run(128, 0.5, 5));
    let fine = max_resid(&reference_run(256, 0.5, 5));
    let factor = coarse / fine;

    let grid = Grid2D::new(128).unwrap();
    let problem = BoussinesqProblem::new(
        SpectralField::zeros(grid),
        SpectralField::from_fn(grid, |_, y| (2.0 * y).cos()),
        0.4,
        5.0f64.exp(),
        1.0,
    )
    .unwrap();
    let log = run_boussinesq(
        &problem,
        0.01,
        40,
        MonitorSpec {
            p_list: vec![2.0],
            block_p: 2.0,
            smoothing_alpha: 0.4,
            smoothing_beta: 1.0,
            sample_every: 5,
        },
    )
    .unwrap();
    let degenerate = max_resid(&log);
    let pass = factor >= RESIDUAL_DECREASE && degenerate <= DEGENERATE_RESIDUAL;
    verdict(
        9,
        "gamma_residual",
        pass,
        &format!(
            "n128/n256 residual factor {factor:.2} (coarse {coarse:.2e}), at-rest residual {degenerate:.2e}"
        ),
    );
}

#[test]
fn criterion_10_smoothing_effect() {
    let _g = serial();
    let ratio_for = |n: usize| {
        let log = reference_run(n, 1.0, 1);
        let numerator = log.smoothing.iter().skip(1).fold(0.0f64, |m, &x| m.max(x));
        let theta_p0 = log.theta_lp[0][0];
        let theta_inf0 = log.theta_lp[0][1];
        let mut omega_int = 0.0;
        for k in 1..log.times.len() {
            let dt = log.times[k] - log.times[k - 1];
            omega_int += 0.5 * dt * (log.omega_lp[k][0] + log.omega_lp[k - 1][0]);
        }
        numerator / (theta_p0 + theta_inf0 * omega_int)
    };
    let coarse = ratio_for(128);
    let fine = ratio_for(256);
    let drift = (fine / coarse - 1.0).abs();
    let pass =
        coarse.is_finite() && fine.is_finite() && coarse <= SMOOTHING_CEILING && drift < DRIFT_TOL;
    verdict(
        10,
        "smoothing_effect",
        pass,
        &format!(
            "ratio {coarse:.3e} (n128) vs {fine:.3e} (n256), drift {:.1}%",
            drift * 100.0
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    let _g = serial();
    let exe = env!("CARGO_BIN_EXE_logbouss");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let status = std::process::Command::new(exe)
            .args(["verify", "--grid", "128", "--seed", "7", "--out"])
            .arg(dir.path())
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "verify run failed");
    }
    let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    let mut identical = !names.is_empty();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        identical &= a == b;
    }
    verdict(
        11,
        "determinism",
        identical,
        &format!(
            "{} csv files byte-identical across two seeded runs",
            names.len()
        ),
    );
}
