//! `logbouss`: parameter scans, simulations, and inequality verification
//! for the logarithmically damped dissipation operator, emitting CSV, JSON
//! and optional SVG artifacts.

mod config;
mod svg;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use config::{Overrides, RunConfig};
use logbouss_core::evolve::{
    self, BoussinesqProblem, DissipationSpec, MonitorSpec, TDProblem, Velocity,
};
use logbouss_core::kernel::{kernel_eval, poisson_kernel_1d, KernelParams, KernelReport};
use logbouss_core::phi::{askey_check, log_radii, PhiParams};
use logbouss_core::symbol::biot_savart;
use logbouss_core::verify::{
    check_commutator, check_generalized_bernstein, check_multiplier_bernstein, commutator_corpus,
    run_suite, standard_corpus, InequalityReport, SuiteConfig,
};
use logbouss_core::{Grid2D, SpectralField};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const PRESETS: [&str; 5] = [
    "maxprinciple",
    "taylor-green",
    "euler-check",
    "boussinesq-reference",
    "stratified",
];

#[derive(Parser)]
#[command(
    name = "logbouss",
    version,
    about = "numerical laboratory for log-damped dissipation"
)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured grid size.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Also emit SVG plots.
    #[arg(long, global = true)]
    plots: bool,
    /// Suppress all plot output, keeping CSV and JSON only.
    #[arg(long = "json-only", global = true)]
    json_only: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kernel scan: mass, minimum, sign conditions over the parameter matrix.
    Kernel,
    /// Sign-condition scan of the symbol profile derivatives.
    Askey,
    /// Time evolution from a named preset.
    Simulate {
        #[arg(long)]
        preset: Option<String>,
    },
    /// Full inequality suite; exit status reflects the aggregate verdict.
    Verify,
    /// Dissipation and multiplier block inequalities only.
    Bernstein,
    /// Riesz-transform commutator inequality only.
    Commutator,
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    plots: bool,
    hash: String,
}

impl Ctx {
    fn footer(&self) -> String {
        format!("config_hash={} version={}", self.hash, VERSION)
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("LOGBOUSS_THREADS") {
        let k: usize = threads
            .parse()
            .map_err(|_| anyhow!("LOGBOUSS_THREADS: '{threads}' is not a positive integer"))?;
        if k == 0 {
            bail!("LOGBOUSS_THREADS: must be >= 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("configuring thread pool")?;
    }
    let mut cfg = config::load(cli.config.as_deref())?;
    let preset = match &cli.cmd {
        Cmd::Simulate { preset } => preset.clone(),
        _ => None,
    };
    config::apply_overrides(
        &mut cfg,
        &Overrides {
            seed: cli.seed,
            grid: cli.grid,
            preset,
        },
    );
    config::validate(&cfg)?;
    let hash = config::config_hash(&cfg);
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let ctx = Ctx {
        cfg,
        out: cli.out,
        plots: cli.plots && !cli.json_only,
        hash,
    };
    match cli.cmd {
        Cmd::Kernel => cmd_kernel(&ctx).map(|_| ExitCode::SUCCESS),
        Cmd::Askey => cmd_askey(&ctx).map(|_| ExitCode::SUCCESS),
        Cmd::Simulate { .. } => cmd_simulate(&ctx).map(|_| ExitCode::SUCCESS),
        Cmd::Verify => cmd_verify(&ctx),
        Cmd::Bernstein => cmd_bernstein(&ctx),
        Cmd::Commutator => cmd_commutator(&ctx),
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

fn threshold(alpha: f64, beta: f64) -> f64 {
    ((3.0 + 2.0 * alpha) / beta).exp()
}

fn kernel_combos(cfg: &RunConfig) -> Vec<(f64, f64, f64, usize, f64)> {
    let mut combos = Vec::new();
    for &a in &cfg.kernel.alpha {
        for &b in &cfg.kernel.beta {
            let lambdas: Vec<f64> = if cfg.kernel.lambda.is_empty() {
                vec![threshold(a, b)]
            } else {
                cfg.kernel.lambda.clone()
            };
            for &l in &lambdas {
                for &d in &cfg.kernel.d {
                    for &t in &cfg.kernel.t {
                        combos.push((a, b, l, d, t));
                    }
                }
            }
        }
    }
    combos
}

fn cmd_kernel(ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let radii = linspace(
        cfg.kernel.radii_lo,
        cfg.kernel.radii_hi,
        cfg.kernel.radii_count,
    );
    let combos = kernel_combos(cfg);
    let reports: Vec<KernelReport> = combos
        .par_iter()
        .map(|&(a, b, l, d, t)| {
            let phi = PhiParams::new(a, b, l)?;
            kernel_eval(KernelParams::new(phi, t, d)?, &radii)
        })
        .collect::<logbouss_core::Result<_>>()
        .map_err(|e| anyhow!("kernel scan: {e}"))?;

    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let header: Vec<&str> = KernelReport::csv_header()
        .split(',')
        .chain(["config_hash", "version"])
        .collect();
    wtr.write_record(&header)?;
    for r in &reports {
        let mut rec = r.csv_record();
        rec.push(ctx.hash.clone());
        rec.push(VERSION.to_string());
        wtr.write_record(&rec)?;
    }
    ctx.write("kernel_scan.csv", &String::from_utf8(wtr.into_inner()?)?)?;

    let worst_mass = reports
        .iter()
        .map(|r| (r.mass - 1.0).abs())
        .fold(0.0f64, f64::max);
    let worst_min = reports
        .iter()
        .map(|r| r.min_value)
        .fold(f64::INFINITY, f64::min);
    println!(
        "kernel scan: {} cases, worst |mass - 1| = {worst_mass:.3e}, global min = {worst_min:.3e}",
        reports.len()
    );

    if ctx.plots {
        plot_kernel(ctx, &reports)?;
    }
    Ok(())
}

fn plot_kernel(ctx: &Ctx, reports: &[KernelReport]) -> Result<()> {
    let t0 = ctx.cfg.kernel.t[0];
    for r in reports.iter().filter(|r| r.t == t0) {
        let pts: Vec<(f64, f64)> = r
            .radii
            .iter()
            .copied()
            .zip(r.values.iter().copied())
            .collect();
        let mut series = vec![svg::Series {
            label: format!("d={}", r.d),
            points: pts,
        }];
        let mut title = format!(
            "kernel: alpha={} beta={} lambda={:.4} t={}",
            r.params_alpha, r.params_beta, r.params_lambda, r.t
        );
        if r.params_alpha == 0.0 && r.params_beta == 1.0 && r.d == 1 {
            let overlay: Vec<(f64, f64)> = r
                .radii
                .iter()
                .map(|&x| (x, poisson_kernel_1d(r.t, x)))
                .collect();
            let dev = r
                .radii
                .iter()
                .zip(&r.values)
                .map(|(&x, &v)| (v - poisson_kernel_1d(r.t, x)).abs() / poisson_kernel_1d(r.t, x))
                .fold(0.0f64, f64::max);
            series.push(svg::Series {
                label: "poisson closed form".to_string(),
                points: overlay,
            });
            title.push_str(&format!(" (max rel dev {dev:.2e})"));
        }
        let name = format!(
            "kernel_curve_a{}_b{}_d{}.svg",
            r.params_alpha, r.params_beta, r.d
        );
        ctx.write(
            &name,
            &svg::line_plot(&title, "r", "K_t(r)", &series, &ctx.footer()),
        )?;
    }

    let alphas = &ctx.cfg.kernel.alpha;
    let betas = &ctx.cfg.kernel.beta;
    let ok: Vec<Vec<bool>> = alphas
        .iter()
        .map(|&a| {
            betas
                .iter()
                .map(|&b| {
                    reports
                        .iter()
                        .filter(|r| r.params_alpha == a && r.params_beta == b)
                        .all(|r| {
                            r.min_value >= -1e-8
                                && r.askey.d1_nonnegative
                                && r.askey.d2_nonpositive
                                && r.askey.d3_nonnegative
                        })
                })
                .collect()
        })
        .collect();
    ctx.write(
        "kernel_positivity_map.svg",
        &svg::indicator_map(
            "kernel positivity at threshold damping",
            "alpha",
            "beta",
            alphas,
            betas,
            &ok,
            &ctx.footer(),
        ),
    )?;
    Ok(())
}

fn cmd_askey(ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let radii = log_radii(
        cfg.askey.radii_lo,
        cfg.askey.radii_hi,
        cfg.askey.radii_count,
    );
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    wtr.write_record([
        "alpha",
        "beta",
        "lambda",
        "threshold",
        "meets_threshold",
        "phi1_nonneg",
        "phi2_nonpos",
        "phi3_nonneg",
        "first_violation_r",
        "config_hash",
        "version",
    ])?;
    let mut all_pass = true;
    for &a in &cfg.kernel.alpha {
        for &b in &cfg.kernel.beta {
            let lambdas: Vec<f64> = if cfg.kernel.lambda.is_empty() {
                vec![threshold(a, b)]
            } else {
                cfg.kernel.lambda.clone()
            };
            for &l in &lambdas {
                let params = PhiParams::new(a, b, l).map_err(|e| anyhow!("askey scan: {e}"))?;
                let report = askey_check(&params, &radii);
                let pass = report.d1_nonnegative && report.d2_nonpositive && report.d3_nonnegative;
                all_pass &= pass;
                wtr.write_record([
                    a.to_string(),
                    b.to_string(),
                    l.to_string(),
                    params.threshold().to_string(),
                    params.meets_threshold().to_string(),
                    report.d1_nonnegative.to_string(),
                    report.d2_nonpositive.to_string(),
                    report.d3_nonnegative.to_string(),
                    report
                        .first_violation_r
                        .map(|r| r.to_string())
                        .unwrap_or_default(),
                    ctx.hash.clone(),
                    VERSION.to_string(),
                ])?;
            }
        }
    }
    ctx.write("askey_scan.csv", &String::from_utf8(wtr.into_inner()?)?)?;
    println!(
        "askey scan: sign conditions {} over {} radii",
        if all_pass { "hold" } else { "VIOLATED" },
        radii.len()
    );
    Ok(())
}

enum Problem {
    Scalar(TDProblem),
    Coupled(BoussinesqProblem),
}

fn build_preset(cfg: &RunConfig) -> Result<Problem> {
    let s = &cfg.simulate;
    let grid = Grid2D::new(cfg.grid.n).map_err(|e| anyhow!("grid.n: {e}"))?;
    let core = |r: logbouss_core::Error| anyhow!("preset {}: {r}", s.preset);
    match s.preset.as_str() {
        "maxprinciple" => {
            let theta0 = evolve::gaussian_bump(grid, 2.8, 3.2, 0.7, s.amplitude);
            let d = DissipationSpec::new(s.kappa, s.alpha, s.beta, s.lambda).map_err(core)?;
            Ok(Problem::Scalar(
                TDProblem::new(theta0, Velocity::Shear { amplitude: 1.0 }, d)
                    .map_err(core)?
                    .with_cfl(s.cfl),
            ))
        }
        "taylor-green" => {
            let theta0 = evolve::gaussian_bump(grid, 2.8, 3.2, 0.7, s.amplitude);
            let d = DissipationSpec::new(s.kappa, s.alpha, s.beta, s.lambda).map_err(core)?;
            Ok(Problem::Scalar(
                TDProblem::new(theta0, Velocity::TaylorGreen { amplitude: 1.0 }, d)
                    .map_err(core)?
                    .with_cfl(s.cfl),
            ))
        }
        "euler-check" => {
            // theta = 0 reduces the system to 2D Euler; Taylor-Green vorticity
            // is a steady solution, so every omega norm must hold still. For
            // moving data the grid sup fluctuates at the sampling floor and a
            // conservation readout this tight would be meaningless.
            let omega0 = evolve::taylor_green_vorticity(grid, s.amplitude);
            let theta0 = SpectralField::zeros(grid);
            Ok(Problem::Coupled(
                BoussinesqProblem::new(omega0, theta0, s.alpha.min(0.5), s.lambda, s.kappa)
                    .map_err(core)?
                    .with_cfl(s.cfl),
            ))
        }
        "boussinesq-reference" => {
            let omega0 = evolve::taylor_green_vorticity(grid, s.amplitude);
            let theta0 = evolve::gaussian_bump(grid, 3.5, 3.0, 0.9, 0.5 * s.amplitude);
            Ok(Problem::Coupled(
                BoussinesqProblem::new(omega0, theta0, s.alpha.min(0.5), s.lambda, s.kappa)
                    .map_err(core)?
                    .with_cfl(s.cfl),
            ))
        }
        "stratified" => {
            let omega0 = SpectralField::zeros(grid);
            let theta0 = SpectralField::from_fn(grid, |_, y| s.amplitude * (2.0 * y).cos());
            Ok(Problem::Coupled(
                BoussinesqProblem::new(omega0, theta0, s.alpha.min(0.5), s.lambda, s.kappa)
                    .map_err(core)?
                    .with_cfl(s.cfl),
            ))
        }
        other => bail!(
            "unknown preset '{other}'; available presets: {}",
            PRESETS.join(", ")
        ),
    }
}

fn append_columns(csv: &str, extra: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(csv.len());
    for (k, line) in csv.split("\r\n").enumerate() {
        if line.is_empty() {
            continue;
        }
        out.push_str(line);
        for (name, value) in extra {
            out.push(',');
            out.push_str(if k == 0 { name } else { value });
        }
        out.push_str("\r\n");
    }
    out
}

fn cmd_simulate(ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let s = &cfg.simulate;
    let grid = Grid2D::new(cfg.grid.n).map_err(|e| anyhow!("grid.n: {e}"))?;
    let problem = build_preset(cfg)?;
    let vmax = match &problem {
        Problem::Scalar(p) => {
            let v = p.velocity.sample(grid).map_err(|e| anyhow!("{e}"))?;
            evolve::sup_speed(&v)
        }
        // the flow can accelerate, so leave CFL headroom
        Problem::Coupled(p) => {
            2.0 * evolve::sup_speed(&biot_savart(&p.omega0).map_err(|e| anyhow!("{e}"))?)
        }
    };
    let dt = if vmax > 0.0 {
        s.cfl * grid.dx() / vmax
    } else {
        s.cfl * grid.dx()
    };
    let steps = match s.t_final {
        Some(t) => (t / dt).ceil() as usize,
        None => s.steps,
    };
    let monitor = MonitorSpec {
        p_list: vec![1.0, 2.0, 4.0, f64::INFINITY],
        block_p: 2.0,
        smoothing_alpha: s.alpha,
        smoothing_beta: match &problem {
            Problem::Scalar(_) => s.beta,
            Problem::Coupled(_) => 1.0,
        },
        sample_every: s.sample_every,
    };
    let (log, scheme, theory_note) = match &problem {
        Problem::Scalar(p) => {
            let log = evolve::run_td(p, dt, steps, monitor)
                .map_err(|e| anyhow!("preset {}: {e}", s.preset))?;
            (log, "heun-integrating-factor", serde_json::Value::Null)
        }
        Problem::Coupled(p) => {
            let log = evolve::run_boussinesq(p, dt, steps, monitor)
                .map_err(|e| anyhow!("preset {}: {e}", s.preset))?;
            (
                log,
                "heun-integrating-factor-coupled",
                serde_json::json!(p.alpha_in_theory_range()),
            )
        }
    };

    let csv = append_columns(
        &log.csv_string(),
        &[("config_hash", &ctx.hash), ("version", VERSION)],
    );
    ctx.write("trajectory.csv", &csv)?;

    let smoothing_sup = log
        .smoothing
        .iter()
        .skip(1) // blocks q >= 0
        .fold(0.0f64, |m, &x| m.max(x));
    let max_residual = log
        .gamma_residual
        .iter()
        .fold(0.0f64, |m, &(_, r)| m.max(r));
    let meta = serde_json::json!({
        "grid": cfg.grid.n,
        "seed": cfg.grid.seed,
        "scheme": scheme,
        "version": VERSION,
        "config_hash": ctx.hash,
        "preset": s.preset,
        "dt": dt,
        "steps": steps,
        "params": {
            "kappa": s.kappa,
            "alpha": s.alpha,
            "beta": s.beta,
            "lambda": s.lambda,
            "cfl": s.cfl,
            "amplitude": s.amplitude,
        },
        "alpha_in_theory_range": theory_note,
        "final_time": log.times.last(),
        "final_theta_lp": log.theta_lp.last(),
        "final_omega_lp": log.omega_lp.last(),
        "smoothing_sup": smoothing_sup,
        "max_gamma_residual": max_residual,
    });
    ctx.write("run.json", &serde_json::to_string_pretty(&meta)?)?;
    println!(
        "simulate {}: {} steps of dt={dt:.4e}, final time {:.4}",
        s.preset,
        steps,
        log.times.last().copied().unwrap_or(0.0)
    );

    if ctx.plots {
        let labels = ["L1", "L2", "L4", "Linf"];
        let series: Vec<svg::Series> = labels
            .iter()
            .enumerate()
            .map(|(i, lab)| svg::Series {
                label: format!("theta {lab}"),
                points: log
                    .times
                    .iter()
                    .zip(&log.theta_lp)
                    .map(|(&t, row)| (t, row[i]))
                    .collect(),
            })
            .collect();
        ctx.write(
            "norms.svg",
            &svg::line_plot(
                &format!("norm history: {}", s.preset),
                "t",
                "norm",
                &series,
                &ctx.footer(),
            ),
        )?;
    }
    Ok(())
}

fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    SuiteConfig {
        n: cfg.grid.n,
        seed: cfg.grid.seed,
        alpha: cfg.verify.alpha,
        beta: cfg.verify.beta,
        lambda: cfg.verify.lambda,
        ceiling: cfg.verify.ceiling,
        p_list: cfg.verify.p_list.clone(),
        commutator_p: cfg.verify.commutator_p,
        commutator_rho: cfg.verify.commutator_rho,
        besov_r: cfg.verify.besov_r,
        eps_list: cfg.verify.eps_list.clone(),
    }
}

fn emit_reports(ctx: &Ctx, reports: &[InequalityReport], summary_name: &str) -> Result<bool> {
    for r in reports {
        ctx.write(
            &format!("verify_{}.csv", r.name),
            &r.csv_string(&ctx.hash, VERSION),
        )?;
        println!(
            "report {}: {} cases, max ratio {:.4e} (ceiling {:.1e}) {}",
            r.name,
            r.cases.len(),
            r.max_ratio,
            r.ceiling,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let summary = serde_json::json!({
        "all_pass": all_pass,
        "config_hash": ctx.hash,
        "version": VERSION,
        "reports": reports.iter().map(|r| serde_json::json!({
            "name": r.name,
            "params": r.params,
            "cases": r.cases.len(),
            "max_ratio": r.max_ratio,
            "ceiling": r.ceiling,
            "pass": r.pass,
        })).collect::<Vec<_>>(),
    });
    ctx.write(summary_name, &serde_json::to_string_pretty(&summary)?)?;
    if ctx.plots {
        let series = vec![svg::Series {
            label: "max ratio".to_string(),
            points: reports
                .iter()
                .enumerate()
                .map(|(k, r)| (k as f64, r.max_ratio))
                .collect(),
        }];
        ctx.write(
            "verify_ratios.svg",
            &svg::line_plot(
                "max ratio per report",
                "report index",
                "ratio",
                &series,
                &ctx.footer(),
            ),
        )?;
    }
    Ok(all_pass)
}

fn cmd_verify(ctx: &Ctx) -> Result<ExitCode> {
    let reports = run_suite(&suite_config(&ctx.cfg)).map_err(|e| anyhow!("verify: {e}"))?;
    let all_pass = emit_reports(ctx, &reports, "verify_summary.json")?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_bernstein(ctx: &Ctx) -> Result<ExitCode> {
    let sc = suite_config(&ctx.cfg);
    let grid = Grid2D::new(sc.n).map_err(|e| anyhow!("grid.n: {e}"))?;
    let fields = standard_corpus(grid, sc.seed).map_err(|e| anyhow!("corpus: {e}"))?;
    let mut reports = Vec::new();
    for &p in &sc.p_list {
        let (lower, upper) =
            check_generalized_bernstein(&fields, sc.alpha, sc.beta, sc.lambda, p, sc.ceiling)
                .map_err(|e| anyhow!("bernstein p={p}: {e}"))?;
        reports.push(lower);
        reports.push(upper);
        reports.push(
            check_multiplier_bernstein(&fields, sc.alpha, sc.beta, sc.lambda, p, sc.ceiling)
                .map_err(|e| anyhow!("multiplier p={p}: {e}"))?,
        );
    }
    let all_pass = emit_reports(ctx, &reports, "bernstein_summary.json")?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_commutator(ctx: &Ctx) -> Result<ExitCode> {
    let sc = suite_config(&ctx.cfg);
    let grid = Grid2D::new(sc.n).map_err(|e| anyhow!("grid.n: {e}"))?;
    let pairs = commutator_corpus(grid, sc.seed).map_err(|e| anyhow!("corpus: {e}"))?;
    let report = check_commutator(
        &pairs,
        sc.alpha,
        sc.lambda,
        sc.commutator_p,
        sc.commutator_rho,
        sc.besov_r,
        &sc.eps_list,
        sc.ceiling,
    )
    .map_err(|e| anyhow!("commutator: {e}"))?;
    let all_pass = emit_reports(ctx, &[report], "commutator_summary.json")?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
