//! Configuration-driven runner for the figure datasets of the photon-blockade
//! laboratory.
//!
//! A TOML [`config::ExperimentConfig`] selects one experiment; [`run`]
//! computes it on a worker pool, then a single writer emits the CSV tables
//! and a JSON [`output::RunManifest`] with checksums and convergence
//! certificates.

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

pub mod config;
pub mod experiments;
pub mod output;

use config::{ExperimentConfig, Resolution, ValidationReport};
use experiments::{dispatch, Context, Outcome};
use output::{BasisInfo, RunManifest, Tolerances};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Validation(#[from] ValidationReport),
    #[error("solver failure: {0}")]
    Solver(#[from] upb_core::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Solver(_) | CliError::Io(_) => 2,
        }
    }
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub cutoff: Option<usize>,
    pub resolution: Option<Resolution>,
}

impl RunOptions {
    pub fn apply(&self, cfg: &ExperimentConfig) -> ExperimentConfig {
        let mut c = cfg.clone();
        if let Some(n) = self.cutoff {
            c.cutoff = Some(n);
        }
        if let Some(r) = self.resolution {
            c.resolution = r;
        }
        if let Some(o) = &self.out {
            c.output_dir = Some(o.clone());
        }
        c
    }
}

/// Loads and validates a configuration with overrides applied.
pub fn load(path: &Path, opts: &RunOptions) -> Result<ExperimentConfig, ValidationReport> {
    let cfg = opts.apply(&ExperimentConfig::load(path)?);
    cfg.validate()?;
    Ok(cfg)
}

/// Computes the experiment without writing anything.
pub fn compute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Outcome, CliError> {
    let ctx = Context::new(cfg)?;
    // determinism: no threading inside the dense kernels
    upb_core::linalg::use_sequential_kernels();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(pool.install(|| dispatch(&ctx))?)
}

/// Computes the experiment and writes its tables and manifest to the
/// configured output directory (default `out/<experiment>`).
pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let outcome = compute(cfg, workers)?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(cfg.experiment.id()));
    let artifacts = output::write_tables(&dir, &outcome.tables)?;
    let tol = upb_core::dynamics::default_tolerances();
    let mut warnings = outcome.warnings.clone();
    for c in outcome.certificates.iter().filter(|c| !c.converged) {
        warnings.push(format!(
            "not converged: {} ({} changes by {:.3e} from N={} to N={}, top manifold {:?})",
            c.label,
            c.observable,
            c.relative_change,
            c.cutoff,
            c.cutoff + 2,
            c.top_manifold_population
        ));
    }
    let mut echo = cfg.clone();
    echo.output_dir = None;
    let manifest = RunManifest {
        experiment: cfg.experiment.id().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        resolution: format!("{:?}", cfg.resolution).to_lowercase(),
        reduced_resolution: cfg.resolution == Resolution::Low,
        config: serde_json::to_value(&echo).map_err(std::io::Error::other)?,
        units: "hbar = 1; rates and energies in kappa; times in 1/kappa".into(),
        tolerances: Tolerances {
            steady_state_residual: upb_core::dynamics::STEADY_RESIDUAL_TOL,
            ode_rtol: tol.rtol,
            ode_atol: tol.atol,
            top_manifold_population: output::TOP_MANIFOLD_TOL,
            cutoff_relative_change: output::CUTOFF_CHANGE_TOL,
        },
        basis: BasisInfo {
            cutoff: cfg.cutoff(),
            cutoff_limit: cfg.cutoff_limit,
            states: outcome.states,
            frame: if outcome.frame.is_empty() { "analytic".into() } else { outcome.frame.clone() },
        },
        converged: outcome.certificates.iter().all(|c| c.converged),
        certificates: outcome.certificates,
        summary: outcome.summary,
        warnings,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts,
    };
    output::write_manifest(&dir, &manifest)?;
    Ok(manifest)
}

/// `(id, description)` of every experiment.
pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    config::Experiment::ALL.iter().map(|e| (e.id(), e.description())).collect()
}
