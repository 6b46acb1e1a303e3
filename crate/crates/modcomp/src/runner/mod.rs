//! Executes one experiment config and writes its artifacts.

mod derivatives;
mod identities;
mod model;
mod probe;
mod symbol;
mod weights;

use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::RunError;
use crate::report::{unix_now, write_manifest, CheckOutcome, Manifest};

pub use derivatives::central_difference;
pub use identities::standard_quadruples;

/// Result of a completed run. `passed` is false when any check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Artifacts and checks produced by one experiment kind.
#[derive(Debug, Default)]
pub(crate) struct Produced {
    pub files: Vec<PathBuf>,
    pub checks: Vec<CheckOutcome>,
}

pub(crate) struct Context<'a> {
    pub dir: &'a Path,
    pub name: &'a str,
    pub budget: u64,
}

impl Context<'_> {
    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}_{suffix}", self.name))
    }
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, RunError> {
    config.validate()?;
    std::fs::create_dir_all(dir)?;
    let started = unix_now();
    let ctx = Context { dir, name: &config.experiment.name, budget: config.experiment.memory_budget };
    let produced = with_threads(config.experiment.threads, || dispatch(config, &ctx))??;
    let passed = produced.checks.iter().all(|c| c.passed);
    let manifest_path = ctx.path("manifest.json");
    let manifest = Manifest {
        name: ctx.name,
        kind: config.experiment.kind.name(),
        started_unix: started,
        finished_unix: unix_now(),
        passed,
        checks: &produced.checks,
        files: produced.files.iter().map(|p| p.display().to_string()).collect(),
        config,
    };
    write_manifest(&manifest_path, &manifest)?;
    Ok(RunOutcome { passed, checks: produced.checks, files: produced.files, manifest: manifest_path })
}

fn dispatch(config: &ExperimentConfig, ctx: &Context<'_>) -> Result<Produced, RunError> {
    match config.experiment.kind {
        ExperimentKind::Weights => weights::run(config.weights.as_ref().expect("validated"), ctx),
        ExperimentKind::StftIdentities => identities::run(config.stft_identities.as_ref().expect("validated"), ctx),
        ExperimentKind::SymbolDecay => symbol::run(config.symbol_decay.as_ref().expect("validated"), ctx),
        ExperimentKind::DerivativeBounds => {
            derivatives::run(config.derivative_bounds.as_ref().expect("validated"), ctx)
        }
        ExperimentKind::OperatorModel => model::run(config.operator_model.as_ref().expect("validated"), ctx),
        ExperimentKind::NormProbe => probe::run(config.norm_probe.as_ref().expect("validated"), ctx),
    }
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::config(format!("experiment.threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    Ok(f())
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
