//! Time evolution: pseudo-spectral advection-dissipation stepping for a
//! scalar, and the coupled vorticity/temperature system with buoyancy.
//!
//! Both use a Heun (explicit trapezoid) scheme with the dissipation handled
//! by an exact integrating factor, so pure dissipation reproduces the
//! semigroup to machine precision and the advective CFL is the only step
//! restriction. Nonlinear products are formed pointwise and dealiased with
//! the grid's 2/3-rule cut.

use crate::dyadic::{build_filter_bank, DyadicFilterBank};
use crate::field::SpectralField;
use crate::grid::Grid2D;
use crate::symbol::{apply_multiplier, biot_savart, log_dissipation_symbol, riesz_log_symbol};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Prescribed advecting velocity for the scalar problem.
#[derive(Clone, Debug)]
pub enum Velocity {
    Zero,
    Constant {
        v1: f64,
        v2: f64,
    },
    /// `v = (a sin x2, 0)`
    Shear {
        amplitude: f64,
    },
    /// `v = (a sin x1 cos x2, -a cos x1 sin x2)`
    TaylorGreen {
        amplitude: f64,
    },
    Steady {
        v1: SpectralField,
        v2: SpectralField,
    },
}

impl Velocity {
    pub fn sample(&self, grid: Grid2D) -> Result<(SpectralField, SpectralField)> {
        match self {
            Velocity::Zero => Ok((SpectralField::zeros(grid), SpectralField::zeros(grid))),
            Velocity::Constant { v1, v2 } => Ok((
                SpectralField::from_fn(grid, |_, _| *v1),
                SpectralField::from_fn(grid, |_, _| *v2),
            )),
            Velocity::Shear { amplitude } => {
                let a = *amplitude;
                Ok((
                    SpectralField::from_fn(grid, |_, y| a * y.sin()),
                    SpectralField::zeros(grid),
                ))
            }
            Velocity::TaylorGreen { amplitude } => {
                let a = *amplitude;
                Ok((
                    SpectralField::from_fn(grid, |x, y| a * x.sin() * y.cos()),
                    SpectralField::from_fn(grid, |x, y| -a * x.cos() * y.sin()),
                ))
            }
            Velocity::Steady { v1, v2 } => {
                if v1.grid() != grid || v2.grid() != grid {
                    return Err(Error::GridMismatch {
                        a: grid.n(),
                        b: v1.grid().n(),
                    });
                }
                Ok((v1.clone(), v2.clone()))
            }
        }
    }
}

/// Pointwise maximum speed of a velocity field.
pub fn sup_speed(v: &(SpectralField, SpectralField)) -> f64 {
    v.0.values()
        .iter()
        .zip(v.1.values())
        .fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)))
}

fn divergence_defect(v: &(SpectralField, SpectralField)) -> Result<f64> {
    let div = v.0.dx1().add(&v.1.dx2())?;
    div.lp_norm(f64::INFINITY)
}

/// `dealias(v . grad f)`
fn advect(v: &(SpectralField, SpectralField), f: &SpectralField) -> Result<SpectralField> {
    let a = v.0.pointwise_mul(&f.dx1())?;
    let b = v.1.pointwise_mul(&f.dx2())?;
    Ok(a.add(&b)?.dealias())
}

fn check_finite(f: &SpectralField, step: usize, what: &'static str) -> Result<()> {
    if f.coeffs()
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(Error::NonFinite { step, what });
    }
    Ok(())
}

/// Dissipation strength and symbol parameters: the operator applied to the
/// scalar is `kappa * |D|^beta / log^alpha(lambda + |D|)`.
#[derive(Clone, Copy, Debug)]
pub struct DissipationSpec {
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl DissipationSpec {
    pub fn new(kappa: f64, alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::param("kappa", format!("{kappa} must be >= 0")));
        }
        // validates the symbol parameter ranges
        log_dissipation_symbol(alpha, beta, lambda)?;
        Ok(DissipationSpec {
            kappa,
            alpha,
            beta,
            lambda,
        })
    }

    /// `exp(-kappa m(|xi|) dt)` for every grid mode.
    fn integrating_factor(&self, grid: Grid2D, dt: f64) -> Vec<f64> {
        let sym = log_dissipation_symbol(self.alpha, self.beta, self.lambda)
            .expect("parameters validated at construction");
        let n = grid.n();
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (x1, x2) = grid.freq_pair(i, j);
                e[grid.idx(i, j)] = (-self.kappa * dt * sym.eval(x1, x2)).exp();
            }
        }
        e
    }
}

fn apply_factor(f: &SpectralField, e: &[f64], grid: Grid2D) -> SpectralField {
    let coeffs: Vec<Complex64> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * e[k])
        .collect();
    SpectralField::from_coeffs(grid, coeffs).expect("length preserved")
}

/// Scalar advection-dissipation problem
/// `d theta/dt + v . grad theta + kappa L theta = forcing`.
#[derive(Clone, Debug)]
pub struct TDProblem {
    pub grid: Grid2D,
    pub theta0: SpectralField,
    pub velocity: Velocity,
    pub dissipation: DissipationSpec,
    pub forcing: Option<SpectralField>,
    /// Advective CFL fraction; 0.5 suits dissipative runs, transport-only
    /// accuracy studies want 0.05 to 0.1.
    pub cfl: f64,
}

impl TDProblem {
    pub fn new(
        theta0: SpectralField,
        velocity: Velocity,
        dissipation: DissipationSpec,
    ) -> Result<Self> {
        let grid = theta0.grid();
        let v = velocity.sample(grid)?;
        let defect = divergence_defect(&v)?;
        if defect > 1e-10 * (1.0 + sup_speed(&v)) {
            return Err(Error::param(
                "velocity",
                format!("divergence defect {defect:.3e}"),
            ));
        }
        Ok(TDProblem {
            grid,
            theta0,
            velocity,
            dissipation,
            forcing: None,
            cfl: 0.5,
        })
    }

    pub fn with_forcing(mut self, forcing: SpectralField) -> Result<Self> {
        if forcing.grid() != self.grid {
            return Err(Error::GridMismatch {
                a: self.grid.n(),
                b: forcing.grid().n(),
            });
        }
        self.forcing = Some(forcing);
        Ok(self)
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    fn check_cfl(&self, v: &(SpectralField, SpectralField), dt: f64) -> Result<()> {
        let speed = sup_speed(v);
        if speed > 0.0 {
            let dt_max = self.cfl * self.grid.dx() / speed;
            if dt > dt_max {
                return Err(Error::Cfl { dt, dt_max });
            }
        }
        Ok(())
    }
}

/// One integrating-factor Heun step of the scalar problem.
pub fn step_td(problem: &TDProblem, theta: &SpectralField, dt: f64) -> Result<SpectralField> {
    let v = problem.velocity.sample(problem.grid)?;
    problem.check_cfl(&v, dt)?;
    let e = problem.dissipation.integrating_factor(problem.grid, dt);
    step_td_inner(problem, theta, &v, &e, dt, 0)
}

fn nonlinear_td(
    problem: &TDProblem,
    v: &(SpectralField, SpectralField),
    theta: &SpectralField,
) -> Result<SpectralField> {
    let mut n = advect(v, theta)?.scale(-1.0);
    if let Some(f) = &problem.forcing {
        n = n.add(f)?;
    }
    Ok(n)
}

fn step_td_inner(
    problem: &TDProblem,
    theta: &SpectralField,
    v: &(SpectralField, SpectralField),
    e: &[f64],
    dt: f64,
    step: usize,
) -> Result<SpectralField> {
    let grid = problem.grid;
    let n0 = nonlinear_td(problem, v, theta)?;
    let predictor = apply_factor(&theta.add(&n0.scale(dt))?, e, grid);
    let n1 = nonlinear_td(problem, v, &predictor)?;
    let out = apply_factor(&theta.add(&n0.scale(0.5 * dt))?, e, grid).add(&n1.scale(0.5 * dt))?;
    check_finite(&out, step, "theta")?;
    Ok(out)
}

/// What to record along a trajectory.
#[derive(Clone, Debug)]
pub struct MonitorSpec {
    pub p_list: Vec<f64>,
    /// Lebesgue exponent for per-block norms and the smoothing integrals.
    pub block_p: f64,
    /// Weight parameters for the smoothing integrals
    /// `2^{q beta} (|q|+1)^{-alpha} int ||Delta_q theta||_p dt`.
    pub smoothing_alpha: f64,
    pub smoothing_beta: f64,
    pub sample_every: usize,
}

impl Default for MonitorSpec {
    fn default() -> Self {
        MonitorSpec {
            p_list: vec![1.0, 2.0, f64::INFINITY],
            block_p: f64::INFINITY,
            smoothing_alpha: 1.0,
            smoothing_beta: 1.0,
            sample_every: 1,
        }
    }
}

fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else if p == p.trunc() {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

/// Time series recorded by [`run_td`] and [`run_boussinesq`].
#[derive(Clone, Debug)]
pub struct TrajectoryLog {
    pub times: Vec<f64>,
    pub p_list: Vec<f64>,
    pub q_max: i32,
    /// `[sample][p index]`
    pub theta_lp: Vec<Vec<f64>>,
    /// `[sample][p index]`, empty when the run has no vorticity
    pub omega_lp: Vec<Vec<f64>>,
    /// `[sample][q + 1]` block norms of theta
    pub block_norms: Vec<Vec<f64>>,
    /// final weighted time integrals, one per block
    pub smoothing: Vec<f64>,
    /// cumulative `int ||grad v||_inf dt` at each sample
    pub v_grad_integral: Vec<f64>,
    /// `(time, residual)` for the transported-combination identity
    pub gamma_residual: Vec<(f64, f64)>,
}

impl TrajectoryLog {
    pub fn csv_string(&self) -> String {
        let mut header = vec!["time".to_string()];
        for &p in &self.p_list {
            header.push(format!("theta_l{}", p_label(p)));
        }
        if !self.omega_lp.is_empty() {
            for &p in &self.p_list {
                header.push(format!("omega_l{}", p_label(p)));
            }
        }
        for q in -1..=self.q_max {
            header.push(format!("block_{q}"));
        }
        header.push("v_grad_integral".to_string());
        header.push("gamma_residual".to_string());
        let mut out = header.join(",");
        out.push_str("\r\n");
        for (k, &t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            for v in &self.theta_lp[k] {
                row.push(v.to_string());
            }
            if !self.omega_lp.is_empty() {
                for v in &self.omega_lp[k] {
                    row.push(v.to_string());
                }
            }
            for v in &self.block_norms[k] {
                row.push(v.to_string());
            }
            row.push(self.v_grad_integral[k].to_string());
            let resid = self
                .gamma_residual
                .iter()
                .find(|(tt, _)| (tt - t).abs() <= 1e-12 * t.abs().max(1.0))
                .map(|(_, r)| r.to_string())
                .unwrap_or_default();
            row.push(resid);
            out.push_str(&row.join(","));
            out.push_str("\r\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let clean = |x: &f64| {
            if x.is_finite() {
                serde_json::json!(x)
            } else {
                serde_json::json!(x.to_string())
            }
        };
        serde_json::json!({
            "times": self.times,
            "p_list": self.p_list.iter().map(clean).collect::<Vec<_>>(),
            "q_max": self.q_max,
            "theta_lp": self.theta_lp,
            "omega_lp": self.omega_lp,
            "block_norms": self.block_norms,
            "smoothing": self.smoothing,
            "v_grad_integral": self.v_grad_integral,
            "gamma_residual": self.gamma_residual,
        })
    }
}

struct Recorder {
    monitor: MonitorSpec,
    bank: DyadicFilterBank,
    log: TrajectoryLog,
    // trapezoid state for the smoothing and gradient integrals
    prev_block: Option<Vec<f64>>,
    prev_grad: f64,
    prev_t: f64,
    pending_grad: f64,
    smoothing_raw: Vec<f64>,
}

impl Recorder {
    fn new(grid: Grid2D, monitor: MonitorSpec, has_omega: bool) -> Result<Self> {
        let bank = build_filter_bank(grid)?;
        let q_max = bank.q_max();
        let log = TrajectoryLog {
            times: Vec::new(),
            p_list: monitor.p_list.clone(),
            q_max,
            theta_lp: Vec::new(),
            omega_lp: if has_omega { Vec::new() } else { vec![] },
            block_norms: Vec::new(),
            smoothing: vec![0.0; (q_max + 2) as usize],
            v_grad_integral: Vec::new(),
            gamma_residual: Vec::new(),
        };
        Ok(Recorder {
            monitor,
            bank,
            log,
            prev_block: None,
            prev_grad: 0.0,
            prev_t: 0.0,
            pending_grad: 0.0,
            smoothing_raw: vec![0.0; (q_max + 2) as usize],
        })
    }

    /// Advance the trapezoid integrals; call at every step.
    fn accumulate(&mut self, t: f64, theta: &SpectralField, grad_v_inf: f64) -> Result<()> {
        let blocks = self.bank.block_norms(theta, self.monitor.block_p)?;
        if let Some(prev) = &self.prev_block {
            let dt = t - self.prev_t;
            for (k, acc) in self.smoothing_raw.iter_mut().enumerate() {
                *acc += 0.5 * dt * (prev[k] + blocks[k]);
            }
            self.pending_grad += 0.5 * dt * (self.prev_grad + grad_v_inf);
        }
        self.prev_block = Some(blocks);
        self.prev_grad = grad_v_inf;
        self.prev_t = t;
        Ok(())
    }

    fn sample(
        &mut self,
        t: f64,
        theta: &SpectralField,
        omega: Option<&SpectralField>,
    ) -> Result<()> {
        self.log.times.push(t);
        let norms: Vec<f64> = self
            .monitor
            .p_list
            .iter()
            .map(|&p| theta.lp_norm(p))
            .collect::<Result<_>>()?;
        self.log.theta_lp.push(norms);
        if let Some(w) = omega {
            let norms: Vec<f64> = self
                .monitor
                .p_list
                .iter()
                .map(|&p| w.lp_norm(p))
                .collect::<Result<_>>()?;
            self.log.omega_lp.push(norms);
        }
        self.log
            .block_norms
            .push(self.prev_block.clone().unwrap_or_default());
        self.log.v_grad_integral.push(self.pending_grad);
        Ok(())
    }

    fn finish(mut self) -> TrajectoryLog {
        let a = self.monitor.smoothing_alpha;
        let b = self.monitor.smoothing_beta;
        for (k, raw) in self.smoothing_raw.iter().enumerate() {
            let q = k as i32 - 1;
            let w = 2.0f64.powf(b * q as f64) * ((q.abs() + 1) as f64).powf(-a);
            self.log.smoothing[k] = w * raw;
        }
        self.log
    }
}

/// Runs the scalar problem for `steps` steps of size `dt`.
pub fn run_td(
    problem: &TDProblem,
    dt: f64,
    steps: usize,
    monitor: MonitorSpec,
) -> Result<TrajectoryLog> {
    let v = problem.velocity.sample(problem.grid)?;
    problem.check_cfl(&v, dt)?;
    let e = problem.dissipation.integrating_factor(problem.grid, dt);
    let grad_inf = grad_sup_norm(&v)?;
    let every = monitor.sample_every.max(1);
    let mut rec = Recorder::new(problem.grid, monitor, false)?;
    let mut theta = problem.theta0.clone();
    rec.accumulate(0.0, &theta, grad_inf)?;
    rec.sample(0.0, &theta, None)?;
    for k in 0..steps {
        theta = step_td_inner(problem, &theta, &v, &e, dt, k)?;
        let t = dt * (k + 1) as f64;
        rec.accumulate(t, &theta, grad_inf)?;
        if (k + 1) % every == 0 || k + 1 == steps {
            rec.sample(t, &theta, None)?;
        }
    }
    Ok(rec.finish())
}

/// Pointwise-Frobenius sup norm of the velocity gradient.
pub fn grad_sup_norm(v: &(SpectralField, SpectralField)) -> Result<f64> {
    let g11 = v.0.dx1();
    let g12 = v.0.dx2();
    let g21 = v.1.dx1();
    let g22 = v.1.dx2();
    let mut m = 0.0f64;
    for k in 0..g11.values().len() {
        let s = g11.values()[k].powi(2)
            + g12.values()[k].powi(2)
            + g21.values()[k].powi(2)
            + g22.values()[k].powi(2);
        m = m.max(s.sqrt());
    }
    Ok(m)
}

/// Coupled vorticity/temperature system with buoyancy forcing
/// `d omega/dt + v.grad omega = d theta/dx1`,
/// `d theta/dt + v.grad theta + kappa L theta = 0`, `v = curl^{-1} omega`,
/// with `L = |D| / log^alpha(lambda + |D|)`.
#[derive(Clone, Debug)]
pub struct BoussinesqProblem {
    pub grid: Grid2D,
    pub omega0: SpectralField,
    pub theta0: SpectralField,
    pub alpha: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub cfl: f64,
}

impl BoussinesqProblem {
    pub fn new(
        omega0: SpectralField,
        theta0: SpectralField,
        alpha: f64,
        lambda: f64,
        kappa: f64,
    ) -> Result<Self> {
        if omega0.grid() != theta0.grid() {
            return Err(Error::GridMismatch {
                a: omega0.grid().n(),
                b: theta0.grid().n(),
            });
        }
        DissipationSpec::new(kappa, alpha, 1.0, lambda)?;
        // mean-free vorticity is required by the velocity inversion
        biot_savart(&omega0)?;
        Ok(BoussinesqProblem {
            grid: omega0.grid(),
            omega0,
            theta0,
            alpha,
            lambda,
            kappa,
            cfl: 0.5,
        })
    }

    /// The global regularity theory covers `alpha` in `[0, 1/2]`; larger
    /// values still run but sit outside it.
    pub fn alpha_in_theory_range(&self) -> bool {
        (0.0..=0.5).contains(&self.alpha)
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    fn dissipation(&self) -> DissipationSpec {
        DissipationSpec {
            kappa: self.kappa,
            alpha: self.alpha,
            beta: 1.0,
            lambda: self.lambda,
        }
    }
}

/// State pair for the coupled system.
#[derive(Clone, Debug)]
pub struct BoussinesqState {
    pub omega: SpectralField,
    pub theta: SpectralField,
}

fn zero_mean(f: &SpectralField) -> SpectralField {
    f.map_coeffs(|(x1, x2), c| {
        if x1 == 0.0 && x2 == 0.0 {
            Complex64::default()
        } else {
            c
        }
    })
}

fn boussinesq_stage(
    v: &(SpectralField, SpectralField),
    s: &BoussinesqState,
) -> Result<(SpectralField, SpectralField)> {
    let n_omega = advect(v, &s.omega)?.scale(-1.0).add(&s.theta.dx1())?;
    let n_theta = advect(v, &s.theta)?.scale(-1.0);
    Ok((n_omega, n_theta))
}

fn step_coupled(
    problem: &BoussinesqProblem,
    s: &BoussinesqState,
    v0: &(SpectralField, SpectralField),
    predictor_velocity: impl Fn(&SpectralField) -> Result<(SpectralField, SpectralField)>,
    e: &[f64],
    dt: f64,
    step: usize,
) -> Result<BoussinesqState> {
    let grid = problem.grid;
    let (nw0, nt0) = boussinesq_stage(v0, s)?;
    let omega_star = zero_mean(&s.omega.add(&nw0.scale(dt))?);
    let theta_star = apply_factor(&s.theta.add(&nt0.scale(dt))?, e, grid);
    let v1 = predictor_velocity(&omega_star)?;
    let star = BoussinesqState {
        omega: omega_star,
        theta: theta_star,
    };
    let (nw1, nt1) = boussinesq_stage(&v1, &star)?;
    let omega = zero_mean(&s.omega.add(&nw0.add(&nw1)?.scale(0.5 * dt))?);
    let theta =
        apply_factor(&s.theta.add(&nt0.scale(0.5 * dt))?, e, grid).add(&nt1.scale(0.5 * dt))?;
    check_finite(&omega, step, "omega")?;
    check_finite(&theta, step, "theta")?;
    Ok(BoussinesqState { omega, theta })
}

/// One Heun step of the coupled system with self-consistent velocity.
pub fn step_boussinesq(
    problem: &BoussinesqProblem,
    s: &BoussinesqState,
    dt: f64,
) -> Result<BoussinesqState> {
    let e = problem.dissipation().integrating_factor(problem.grid, dt);
    let v0 = biot_savart(&s.omega)?;
    check_cfl_speed(problem.grid, problem.cfl, sup_speed(&v0), dt)?;
    step_coupled(problem, s, &v0, biot_savart, &e, dt, 0)
}

/// One Heun step with a prescribed uniform advecting velocity instead of
/// the self-consistent one (the buoyancy source stays on).
pub fn step_uniform_flow(
    problem: &BoussinesqProblem,
    s: &BoussinesqState,
    v: (f64, f64),
    dt: f64,
) -> Result<BoussinesqState> {
    let e = problem.dissipation().integrating_factor(problem.grid, dt);
    let fields = Velocity::Constant { v1: v.0, v2: v.1 }.sample(problem.grid)?;
    check_cfl_speed(problem.grid, problem.cfl, v.0.hypot(v.1), dt)?;
    let frozen = fields.clone();
    step_coupled(problem, s, &fields, move |_| Ok(frozen.clone()), &e, dt, 0)
}

fn check_cfl_speed(grid: Grid2D, cfl: f64, speed: f64, dt: f64) -> Result<()> {
    if speed > 0.0 {
        let dt_max = cfl * grid.dx() / speed;
        if dt > dt_max {
            return Err(Error::Cfl { dt, dt_max });
        }
    }
    Ok(())
}

/// Transported combination `Gamma = omega + R_alpha theta`.
pub fn transported_combination(
    omega: &SpectralField,
    theta: &SpectralField,
    alpha: f64,
    lambda: f64,
) -> Result<SpectralField> {
    let riesz = riesz_log_symbol(alpha, lambda)?;
    omega.add(&apply_multiplier(theta, &riesz))
}

/// `L^2` residual of the evolution identity for `Gamma = omega + R_alpha
/// theta`: centered time difference plus `v.grad Gamma`, the commutator
/// `R_alpha(v.grad theta) - v.grad(R_alpha theta)`, and the buoyancy
/// mismatch `(kappa - 1) d theta/dx1` (zero at unit dissipation strength).
pub fn gamma_residual(
    prev: &BoussinesqState,
    cur: &BoussinesqState,
    next: &BoussinesqState,
    v: &(SpectralField, SpectralField),
    alpha: f64,
    lambda: f64,
    kappa: f64,
    dt: f64,
) -> Result<f64> {
    let riesz = riesz_log_symbol(alpha, lambda)?;
    let gamma_prev = transported_combination(&prev.omega, &prev.theta, alpha, lambda)?;
    let gamma_next = transported_combination(&next.omega, &next.theta, alpha, lambda)?;
    let gamma_cur = transported_combination(&cur.omega, &cur.theta, alpha, lambda)?;
    let dgamma = gamma_next.sub(&gamma_prev)?.scale(0.5 / dt);
    let advection = advect(v, &gamma_cur)?;
    let commutator = apply_multiplier(&advect(v, &cur.theta)?, &riesz)
        .sub(&advect(v, &apply_multiplier(&cur.theta, &riesz))?)?;
    let mismatch = cur.theta.dx1().scale(kappa - 1.0);
    dgamma
        .add(&advection)?
        .add(&commutator)?
        .add(&mismatch)?
        .lp_norm(2.0)
}

/// Runs the coupled system, recording norms and the residual of the
/// transported-combination identity at sampled steps.
pub fn run_boussinesq(
    problem: &BoussinesqProblem,
    dt: f64,
    steps: usize,
    monitor: MonitorSpec,
) -> Result<TrajectoryLog> {
    let e = problem.dissipation().integrating_factor(problem.grid, dt);
    let every = monitor.sample_every.max(1);
    let mut rec = Recorder::new(problem.grid, monitor, true)?;
    let mut states = vec![BoussinesqState {
        omega: zero_mean(&problem.omega0),
        theta: problem.theta0.clone(),
    }];
    let v0 = biot_savart(&states[0].omega)?;
    rec.accumulate(0.0, &states[0].theta, grad_sup_norm(&v0)?)?;
    rec.sample(0.0, &states[0].theta, Some(&states[0].omega))?;
    for k in 0..steps {
        let cur = states.last().unwrap().clone();
        let v = biot_savart(&cur.omega)?;
        check_cfl_speed(problem.grid, problem.cfl, sup_speed(&v), dt)?;
        let next = step_coupled(problem, &cur, &v, biot_savart, &e, dt, k)?;
        let t = dt * (k + 1) as f64;
        rec.accumulate(t, &next.theta, grad_sup_norm(&biot_savart(&next.omega)?)?)?;
        states.push(next);
        if states.len() > 3 {
            states.remove(0);
        }
        // centered residual at the previous step once its successor exists
        if k >= 1 && (k % every == 0 || k == steps - 1) && states.len() == 3 {
            let vmid = biot_savart(&states[1].omega)?;
            let r = gamma_residual(
                &states[0],
                &states[1],
                &states[2],
                &vmid,
                problem.alpha,
                problem.lambda,
                problem.kappa,
                dt,
            )?;
            rec.log.gamma_residual.push((dt * k as f64, r));
        }
        if (k + 1) % every == 0 || k + 1 == steps {
            rec.sample(
                t,
                &states.last().unwrap().theta,
                Some(&states.last().unwrap().omega),
            )?;
        }
    }
    Ok(rec.finish())
}

/// Periodized Gaussian bump centered at `(x0, y0)`.
pub fn gaussian_bump(grid: Grid2D, x0: f64, y0: f64, sigma: f64, amplitude: f64) -> SpectralField {
    let period = grid.period();
    SpectralField::from_fn(grid, |x, y| {
        let mut s = 0.0;
        for i in -1..=1 {
            for j in -1..=1 {
                let dx = x - x0 - i as f64 * period;
                let dy = y - y0 - j as f64 * period;
                s += (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            }
        }
        amplitude * s
    })
}

/// The vorticity `2 a sin x1 sin x2` of the cellular flow
/// `(a sin x1 cos x2, -a cos x1 sin x2)`.
pub fn taylor_green_vorticity(grid: Grid2D, amplitude: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x, y| 2.0 * amplitude * x.sin() * y.sin())
}

/// Deterministic random field with spectrum confined to
/// `kmin <= |k| <= kmax`, rescaled to the given max-norm amplitude.
pub fn random_band_limited(
    grid: Grid2D,
    seed: u64,
    kmin: f64,
    kmax: f64,
    amplitude: f64,
    zero_mean: bool,
) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = kmax.ceil() as i64;
    let mut modes = Vec::new();
    for k1 in 0..=top {
        let lo = if k1 == 0 { 1 } else { -top };
        for k2 in lo..=top {
            let rho = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            if rho >= kmin && rho <= kmax {
                modes.push((k1, k2, c));
            }
        }
    }
    let mut f = SpectralField::from_modes(grid, &modes)?;
    if !zero_mean {
        let offset = rng.random::<f64>() - 0.5;
        f = f.add(&SpectralField::from_fn(grid, |_, _| offset))?;
    }
    let sup = f.lp_norm(f64::INFINITY)?;
    if sup == 0.0 {
        return Ok(f);
    }
    Ok(f.scale(amplitude / sup))
}
