//! Scenario runners. Each one writes its tables into the output directory
//! as soon as they are computed, so a numerical failure keeps the partial
//! artifacts, and records its checked properties in the summary.

mod flows;
mod gauge;
mod kernel;

use crate::config::{ConfigError, ScenarioConfig, ScenarioKind};
use crate::summary::{Artifacts, Summary};
use hypflow::fields::sup_distance;
use hypflow::gauge::heat_limit;
use hypflow::harmonic::{perturb, to_chart};
use hypflow::{Grid, MapField};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] hypflow::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) | RunError::Io(_) => 2,
        }
    }
}

/// Exit status for a finished run.
pub fn exit_code(summary: &Summary) -> i32 {
    if summary.passed {
        0
    } else {
        3
    }
}

/// Runs `cfg`, writing into `out_dir` (or the configured directory).
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: Option<&Path>) -> Result<Summary, RunError> {
    let dir = out_dir.unwrap_or(&cfg.output_dir);
    let mut art = Artifacts::new(dir)?;
    let mut sum = Summary::new(cfg.scenario);
    match cfg.scenario {
        ScenarioKind::Stationary => flows::stationary(cfg, &mut art, &mut sum)?,
        ScenarioKind::HeatRelax => flows::heat_relax(cfg, &mut art, &mut sum)?,
        ScenarioKind::LlConvergence => flows::ll_convergence(cfg, &mut art, &mut sum)?,
        ScenarioKind::SharedLimit => flows::shared_limit(cfg, &mut art, &mut sum)?,
        ScenarioKind::WaveDelta => flows::wave_delta(cfg, &mut art, &mut sum)?,
        ScenarioKind::GaugeCheck => gauge::gauge_check(cfg, &mut art, &mut sum)?,
        ScenarioKind::KernelCheck => kernel::kernel_check(cfg, &mut art, &mut sum)?,
    }
    art.summary(&mut sum)?;
    Ok(sum)
}

/// The target harmonic map on `grid`.
fn target(cfg: &ScenarioConfig, grid: Grid) -> MapField {
    to_chart(&cfg.target, &grid)
}

/// The configured initial map: the target, perturbed if requested.
fn initial(cfg: &ScenarioConfig, q: &MapField) -> hypflow::Result<MapField> {
    match &cfg.perturbation {
        Some(p) => perturb(q, p),
        None => Ok(q.clone()),
    }
}

/// Distance between the analytic harmonic map and its discrete heat-flow
/// limit on the same grid.
fn discretization_floor(q: &MapField, tol: f64, s_cap: f64) -> hypflow::Result<f64> {
    let (qh, _) = heat_limit(q, tol, s_cap, 0.5)?;
    sup_distance(&qh, q)
}

fn grid_label(k: usize) -> &'static str {
    if k == 0 {
        "base"
    } else {
        "refined"
    }
}
