//! Run configuration: a single TOML file of nested tables, overridable by
//! command-line flags. The effective config is hashed so every artifact
//! can name the run that produced it.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridCfg,
    pub kernel: KernelCfg,
    pub askey: AskeyCfg,
    pub simulate: SimulateCfg,
    pub verify: VerifyCfg,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridCfg {
    pub n: usize,
    pub seed: u64,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg { n: 128, seed: 7 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelCfg {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Explicit damping shifts; empty means "use the positivity threshold
    /// exp((3 + 2 alpha) / beta) for each (alpha, beta)".
    pub lambda: Vec<f64>,
    pub d: Vec<usize>,
    pub t: Vec<f64>,
    pub radii_lo: f64,
    pub radii_hi: f64,
    pub radii_count: usize,
}

impl Default for KernelCfg {
    fn default() -> Self {
        KernelCfg {
            alpha: vec![0.0, 0.5, 1.0],
            beta: vec![0.5, 1.0],
            lambda: vec![],
            d: vec![1, 2, 3],
            t: vec![0.5, 1.0, 2.0],
            radii_lo: 0.0,
            radii_hi: 10.0,
            radii_count: 41,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AskeyCfg {
    pub radii_lo: f64,
    pub radii_hi: f64,
    pub radii_count: usize,
}

impl Default for AskeyCfg {
    fn default() -> Self {
        AskeyCfg {
            radii_lo: 1e-3,
            radii_hi: 1e6,
            radii_count: 200,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateCfg {
    pub preset: String,
    /// Step count; ignored when `t_final` is set.
    pub steps: usize,
    /// Physical end time; when set the step count is derived from the
    /// CFL-limited step size.
    pub t_final: Option<f64>,
    pub cfl: f64,
    pub sample_every: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub amplitude: f64,
}

impl Default for SimulateCfg {
    fn default() -> Self {
        SimulateCfg {
            preset: "maxprinciple".to_string(),
            steps: 500,
            t_final: None,
            cfl: 0.5,
            sample_every: 10,
            kappa: 1.0,
            alpha: 1.0,
            beta: 1.0,
            lambda: 5.0f64.exp(),
            amplitude: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyCfg {
    pub ceiling: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub p_list: Vec<f64>,
    pub commutator_p: f64,
    pub commutator_rho: f64,
    pub besov_r: f64,
    pub eps_list: Vec<f64>,
}

impl Default for VerifyCfg {
    fn default() -> Self {
        VerifyCfg {
            ceiling: 1e3,
            alpha: 1.0,
            beta: 1.0,
            lambda: 4.0f64.exp(),
            p_list: vec![1.5, 2.0, 4.0],
            commutator_p: 2.0,
            commutator_rho: 4.0,
            besov_r: 1.0,
            eps_list: vec![0.1, 0.3, 0.5],
        }
    }
}

pub fn load(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub preset: Option<String>,
}

pub fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) {
    if let Some(seed) = o.seed {
        cfg.grid.seed = seed;
    }
    if let Some(n) = o.grid {
        cfg.grid.n = n;
    }
    if let Some(preset) = &o.preset {
        cfg.simulate.preset = preset.clone();
    }
}

fn finite_positive(field: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        bail!("{field}: {x} must be positive and finite");
    }
    Ok(())
}

pub fn validate(cfg: &RunConfig) -> Result<()> {
    logbouss_core::Grid2D::new(cfg.grid.n).map_err(|e| anyhow::anyhow!("grid.n: {e}"))?;
    for (name, list) in [
        ("kernel.alpha", &cfg.kernel.alpha),
        ("kernel.beta", &cfg.kernel.beta),
        ("kernel.t", &cfg.kernel.t),
    ] {
        if list.is_empty() {
            bail!("{name}: empty parameter range");
        }
    }
    if cfg.kernel.d.is_empty() {
        bail!("kernel.d: empty parameter range");
    }
    for &d in &cfg.kernel.d {
        if !(1..=3).contains(&d) {
            bail!("kernel.d: dimension {d} not in 1..=3");
        }
    }
    for &a in &cfg.kernel.alpha {
        if !(a >= 0.0 && a.is_finite()) {
            bail!("kernel.alpha: {a} must be >= 0");
        }
    }
    for &b in &cfg.kernel.beta {
        if !(b > 0.0 && b <= 1.0) {
            bail!("kernel.beta: {b} must lie in (0, 1]");
        }
    }
    for &l in &cfg.kernel.lambda {
        if !(l > 1.0 && l.is_finite()) {
            bail!("kernel.lambda: {l} must exceed 1");
        }
    }
    for &t in &cfg.kernel.t {
        finite_positive("kernel.t", t)?;
    }
    if cfg.kernel.radii_count < 2 {
        bail!("kernel.radii_count: need at least 2 radii");
    }
    if !(cfg.kernel.radii_lo >= 0.0 && cfg.kernel.radii_hi > cfg.kernel.radii_lo) {
        bail!(
            "kernel.radii_lo: range [{}, {}] is empty",
            cfg.kernel.radii_lo,
            cfg.kernel.radii_hi
        );
    }
    if cfg.askey.radii_count < 2 {
        bail!("askey.radii_count: need at least 2 radii");
    }
    if !(cfg.askey.radii_lo > 0.0 && cfg.askey.radii_hi > cfg.askey.radii_lo) {
        bail!(
            "askey.radii_lo: range [{}, {}] is empty",
            cfg.askey.radii_lo,
            cfg.askey.radii_hi
        );
    }
    finite_positive("simulate.cfl", cfg.simulate.cfl)?;
    if !(cfg.simulate.kappa >= 0.0 && cfg.simulate.kappa.is_finite()) {
        bail!("simulate.kappa: {} must be >= 0", cfg.simulate.kappa);
    }
    if cfg.simulate.sample_every == 0 {
        bail!("simulate.sample_every: must be >= 1");
    }
    if let Some(t) = cfg.simulate.t_final {
        finite_positive("simulate.t_final", t)?;
    } else if cfg.simulate.steps == 0 {
        bail!("simulate.steps: must be >= 1 when t_final is unset");
    }
    finite_positive("simulate.amplitude", cfg.simulate.amplitude)?;
    if !(cfg.simulate.lambda > 1.0) {
        bail!("simulate.lambda: {} must exceed 1", cfg.simulate.lambda);
    }
    if !(cfg.verify.ceiling >= 0.0) {
        bail!("verify.ceiling: {} must be >= 0", cfg.verify.ceiling);
    }
    if cfg.verify.p_list.is_empty() {
        bail!("verify.p_list: empty parameter range");
    }
    for &p in &cfg.verify.p_list {
        if !(p > 1.0 && p.is_finite()) {
            bail!("verify.p_list: {p} must lie in (1, inf)");
        }
    }
    if !(cfg.verify.commutator_p >= 2.0 && cfg.verify.commutator_p.is_finite()) {
        bail!(
            "verify.commutator_p: {} must lie in [2, inf)",
            cfg.verify.commutator_p
        );
    }
    if !(cfg.verify.commutator_rho >= 1.0) {
        bail!(
            "verify.commutator_rho: {} must be >= 1",
            cfg.verify.commutator_rho
        );
    }
    if !(cfg.verify.besov_r >= 1.0) {
        bail!("verify.besov_r: {} must be >= 1", cfg.verify.besov_r);
    }
    if cfg.verify.eps_list.is_empty() {
        bail!("verify.eps_list: empty parameter range");
    }
    for &e in &cfg.verify.eps_list {
        finite_positive("verify.eps_list", e)?;
    }
    if !(cfg.verify.lambda >= 2.0) {
        bail!("verify.lambda: {} must be >= 2", cfg.verify.lambda);
    }
    Ok(())
}

/// First 12 hex digits of the SHA-256 of the effective config.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}
