//! Scenario configuration: one JSON document per run.
//!
//! The document is parsed in two passes. The common fields are read first;
//! `settings` is then decoded against the struct belonging to `scenario`,
//! so unknown keys are rejected at both levels.

use hypflow::flows::{FlowKind, FlowParams};
use hypflow::gauge::TowerSpec;
use hypflow::harmonic::{HolomorphicMapSpec, PerturbSpec};
use hypflow::Grid;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Stationary,
    HeatRelax,
    LlConvergence,
    SharedLimit,
    GaugeCheck,
    WaveDelta,
    KernelCheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        Self::Stationary,
        Self::HeatRelax,
        Self::LlConvergence,
        Self::SharedLimit,
        Self::GaugeCheck,
        Self::WaveDelta,
        Self::KernelCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Stationary => "stationary",
            Self::HeatRelax => "heat_relax",
            Self::LlConvergence => "ll_convergence",
            Self::SharedLimit => "shared_limit",
            Self::GaugeCheck => "gauge_check",
            Self::WaveDelta => "wave_delta",
            Self::KernelCheck => "kernel_check",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Stationary => "heat flow started at a harmonic map stays at the discretization floor",
            Self::HeatRelax => "heat tower from a perturbed harmonic map: sup |d_s u| decay",
            Self::LlConvergence => "LL flow from a perturbed harmonic map: energy, convergence, time-integral tails",
            Self::SharedLimit => "heat towers launched along one LL run share their limit",
            Self::GaugeCheck => "caloric gauge identities, connection routes and evolution equations",
            Self::WaveDelta => "damped wave approximation approaches LL as delta shrinks",
            Self::KernelCheck => "heat semigroup smoothing ratios and the squared-sup integral",
        }
    }

    /// Acceptance criteria the scenario reports on.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Self::Stationary => &[1],
            Self::HeatRelax => &[7],
            Self::LlConvergence => &[2, 3, 10],
            Self::SharedLimit => &[4],
            Self::GaugeCheck => &[5, 6],
            Self::WaveDelta => &[9],
            Self::KernelCheck => &[8],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    scenario: ScenarioKind,
    grid: Grid,
    #[serde(default)]
    flow: FlowParams,
    target: HolomorphicMapSpec,
    #[serde(default)]
    perturbation: Option<PerturbSpec>,
    #[serde(default)]
    tower: Option<TowerSpec>,
    output_dir: PathBuf,
    #[serde(default)]
    seed: u64,
    /// Store a field snapshot every this many checkpoints; 0 disables.
    #[serde(default)]
    snapshot_stride: usize,
    #[serde(default)]
    settings: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarySettings {
    pub t_final: f64,
    pub checkpoints: usize,
    /// `max |tau|` at which the discrete harmonic limit counts as reached.
    pub limit_tol: f64,
    pub limit_s_cap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatRelaxSettings {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlConvergenceSettings {
    pub t_final: f64,
    pub checkpoints: usize,
    /// Integration step as a fraction of the admissible step.
    pub dt_fraction: f64,
    pub limit_tol: f64,
    pub limit_s_cap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedLimitSettings {
    pub t_final: f64,
    pub checkpoints: usize,
    pub dt_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCheckSettings {
    /// Flow time of the gauged slice family.
    pub t: f64,
    /// Offset of the neighbouring flow times.
    pub dt: f64,
    /// Flow times at which `w` is evaluated on the `s = 0` slice.
    pub w_times: Vec<f64>,
    /// Coarse checkpoint stride and tail tolerance of the connection-route study.
    pub knob_ds: f64,
    pub knob_tail_tol: f64,
    /// Tolerance of the reference harmonic map closing the integral route.
    pub reference_tol: f64,
    pub reference_s_cap: f64,
    /// Random frame rotations used for the gauge-invariance check.
    pub invariance_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveDeltaSettings {
    pub t_final: f64,
    pub deltas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCheckSettings {
    pub samples: Vec<f64>,
    pub bump_center: [f64; 2],
    pub bump_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Settings {
    Stationary(StationarySettings),
    HeatRelax(HeatRelaxSettings),
    LlConvergence(LlConvergenceSettings),
    SharedLimit(SharedLimitSettings),
    GaugeCheck(GaugeCheckSettings),
    WaveDelta(WaveDeltaSettings),
    KernelCheck(KernelCheckSettings),
}

/// A validated scenario configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub grid: Grid,
    pub flow: FlowParams,
    pub target: HolomorphicMapSpec,
    pub perturbation: Option<PerturbSpec>,
    pub tower: Option<TowerSpec>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub snapshot_stride: usize,
    pub settings: Settings,
}

/// Itemized configuration problems, each naming its field.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
pub struct ConfigError(pub Vec<String>);

fn parse_settings<T: for<'de> Deserialize<'de>>(v: &serde_json::Value) -> Result<T, String> {
    let v = if v.is_null() { serde_json::json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| format!("settings: {e}"))
}

fn positive(errs: &mut Vec<String>, field: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{field}: must be finite and > 0, got {v}"));
    }
}

fn at_least_one(errs: &mut Vec<String>, field: &str, n: usize) {
    if n == 0 {
        errs.push(format!("{field}: must be at least 1"));
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError(vec![e.to_string()]))?;
        let mut errs = Vec::new();
        if raw.schema_version != SCHEMA_VERSION {
            errs.push(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                raw.schema_version
            ));
        }
        if let Err(e) = raw.grid.validate() {
            errs.push(format!("grid.{}", strip_param(&e)));
        }
        let kind = match raw.scenario {
            ScenarioKind::Stationary | ScenarioKind::HeatRelax => FlowKind::Heat,
            _ => FlowKind::LandauLifshitz,
        };
        if let Err(e) = raw.flow.validate(kind) {
            errs.push(format!("flow.{}", strip_param(&e)));
        }
        if let Err(e) = raw.target.validate() {
            errs.push(format!("target.{}", strip_param(&e)));
        }
        if let Some(t) = &raw.tower {
            if let Err(e) = t.validate() {
                errs.push(strip_param(&e));
            }
        }
        if let Some(p) = &raw.perturbation {
            positive(&mut errs, "perturbation.radius", p.radius);
            if !p.amplitude.is_finite() {
                errs.push("perturbation.amplitude: must be finite".into());
            }
        }
        let needs_perturbation = !matches!(raw.scenario, ScenarioKind::Stationary | ScenarioKind::KernelCheck);
        if needs_perturbation && raw.perturbation.is_none() {
            errs.push("perturbation: required by this scenario".into());
        }
        let needs_tower = matches!(
            raw.scenario,
            ScenarioKind::HeatRelax | ScenarioKind::SharedLimit | ScenarioKind::GaugeCheck
        );
        if needs_tower && raw.tower.is_none() {
            errs.push("tower: required by this scenario".into());
        }
        let settings = match Self::settings_for(raw.scenario, &raw.settings, &mut errs) {
            Ok(s) => Some(s),
            Err(e) => {
                errs.push(e);
                None
            }
        };
        if !errs.is_empty() {
            return Err(ConfigError(errs));
        }
        Ok(Self {
            scenario: raw.scenario,
            grid: raw.grid,
            flow: raw.flow,
            target: raw.target,
            perturbation: raw.perturbation,
            tower: raw.tower,
            output_dir: raw.output_dir,
            seed: raw.seed,
            snapshot_stride: raw.snapshot_stride,
            settings: settings.expect("no errors implies settings"),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(vec![format!("{}: {e}", path.display())]))?;
        Self::from_json(&text)
    }

    fn settings_for(kind: ScenarioKind, v: &serde_json::Value, errs: &mut Vec<String>) -> Result<Settings, String> {
        Ok(match kind {
            ScenarioKind::Stationary => {
                let s: StationarySettings = parse_settings(v)?;
                positive(errs, "settings.t_final", s.t_final);
                at_least_one(errs, "settings.checkpoints", s.checkpoints);
                positive(errs, "settings.limit_tol", s.limit_tol);
                positive(errs, "settings.limit_s_cap", s.limit_s_cap);
                Settings::Stationary(s)
            }
            ScenarioKind::HeatRelax => Settings::HeatRelax(parse_settings(v)?),
            ScenarioKind::LlConvergence => {
                let s: LlConvergenceSettings = parse_settings(v)?;
                positive(errs, "settings.t_final", s.t_final);
                at_least_one(errs, "settings.checkpoints", s.checkpoints);
                if !(s.dt_fraction > 0.0 && s.dt_fraction <= 1.0) {
                    errs.push(format!("settings.dt_fraction: must lie in (0, 1], got {}", s.dt_fraction));
                }
                positive(errs, "settings.limit_tol", s.limit_tol);
                positive(errs, "settings.limit_s_cap", s.limit_s_cap);
                Settings::LlConvergence(s)
            }
            ScenarioKind::SharedLimit => {
                let s: SharedLimitSettings = parse_settings(v)?;
                positive(errs, "settings.t_final", s.t_final);
                if s.checkpoints < 2 || s.checkpoints % 2 != 0 {
                    errs.push(format!("settings.checkpoints: must be even and >= 2, got {}", s.checkpoints));
                }
                if !(s.dt_fraction > 0.0 && s.dt_fraction <= 1.0) {
                    errs.push(format!("settings.dt_fraction: must lie in (0, 1], got {}", s.dt_fraction));
                }
                Settings::SharedLimit(s)
            }
            ScenarioKind::GaugeCheck => {
                let s: GaugeCheckSettings = parse_settings(v)?;
                positive(errs, "settings.t", s.t);
                positive(errs, "settings.dt", s.dt);
                if s.dt >= s.t {
                    errs.push(format!("settings.dt: must be below settings.t = {}", s.t));
                } else if s.dt > 0.0 && !on_lattice(s.t, s.dt) {
                    errs.push(format!("settings.t: {} is not a multiple of settings.dt", s.t));
                }
                if s.w_times.is_empty() {
                    errs.push("settings.w_times: must not be empty".into());
                }
                for (i, t) in s.w_times.iter().enumerate() {
                    if !(*t >= 2.0 * s.dt && t.is_finite()) {
                        errs.push(format!("settings.w_times[{i}]: must be finite and >= 2 dt, got {t}"));
                    } else if !on_lattice(*t, s.dt) {
                        errs.push(format!("settings.w_times[{i}]: {t} is not a multiple of settings.dt"));
                    }
                }
                positive(errs, "settings.knob_ds", s.knob_ds);
                positive(errs, "settings.knob_tail_tol", s.knob_tail_tol);
                positive(errs, "settings.reference_tol", s.reference_tol);
                positive(errs, "settings.reference_s_cap", s.reference_s_cap);
                Settings::GaugeCheck(s)
            }
            ScenarioKind::WaveDelta => {
                let s: WaveDeltaSettings = parse_settings(v)?;
                positive(errs, "settings.t_final", s.t_final);
                if s.deltas.len() < 2 {
                    errs.push("settings.deltas: need at least two values".into());
                }
                for (i, d) in s.deltas.iter().enumerate() {
                    positive(errs, &format!("settings.deltas[{i}]"), *d);
                }
                if s.deltas.windows(2).any(|w| w[1] >= w[0]) {
                    errs.push("settings.deltas: must be strictly decreasing".into());
                }
                Settings::WaveDelta(s)
            }
            ScenarioKind::KernelCheck => {
                let s: KernelCheckSettings = parse_settings(v)?;
                if s.samples.is_empty() {
                    errs.push("settings.samples: must not be empty".into());
                }
                for (i, x) in s.samples.iter().enumerate() {
                    positive(errs, &format!("settings.samples[{i}]"), *x);
                }
                positive(errs, "settings.bump_radius", s.bump_radius);
                Settings::KernelCheck(s)
            }
        })
    }
}

/// Whether `t` is an integer multiple of `dt` up to rounding.
pub(crate) fn on_lattice(t: f64, dt: f64) -> bool {
    let k = (t / dt).round();
    (k * dt - t).abs() <= 1e-9 * t.abs().max(1.0)
}

/// `"field: reason"` from a core parameter error.
fn strip_param(e: &hypflow::Error) -> String {
    match e {
        hypflow::Error::InvalidParam { field, reason } => format!("{field}: {reason}"),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "schema_version": 1,
            "scenario": "ll_convergence",
            "grid": {"x1_min": -2.0, "x1_max": 2.0, "x2_min": -1.5, "x2_max": 1.5, "n1": 17, "n2": 17},
            "flow": {"alpha": 1.0, "beta": 1.0},
            "target": [[0.0, 0.0], [0.5, 0.0]],
            "perturbation": {"center": [0.0, 0.0], "radius": 1.0, "amplitude": 0.2},
            "output_dir": "out",
            "settings": {"t_final": 1.0, "checkpoints": 4, "dt_fraction": 0.5, "limit_tol": 1e-9, "limit_s_cap": 50.0}
        })
    }

    #[test]
    fn valid_config_parses() {
        let c = ScenarioConfig::from_json(&base().to_string()).unwrap();
        assert_eq!(c.scenario, ScenarioKind::LlConvergence);
        assert!(matches!(c.settings, Settings::LlConvergence(_)));
    }

    #[test]
    fn negative_alpha_names_the_field() {
        let mut v = base();
        v["flow"]["alpha"] = serde_json::json!(-1.0);
        let e = ScenarioConfig::from_json(&v.to_string()).unwrap_err();
        assert!(e.0.iter().any(|m| m.starts_with("flow.alpha")), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected_at_both_levels() {
        let mut v = base();
        v["colour"] = serde_json::json!("red");
        assert!(ScenarioConfig::from_json(&v.to_string()).unwrap_err().to_string().contains("colour"));
        let mut v = base();
        v["settings"]["extra"] = serde_json::json!(1);
        assert!(ScenarioConfig::from_json(&v.to_string()).unwrap_err().to_string().contains("extra"));
    }

    #[test]
    fn tower_ds_above_s_max_is_rejected() {
        let mut v = base();
        v["tower"] = serde_json::json!({"s_max": 1.0, "ds": 2.0, "tail_tol": 1e-8});
        let e = ScenarioConfig::from_json(&v.to_string()).unwrap_err();
        assert!(e.0.iter().any(|m| m.starts_with("tower.ds")), "{e}");
    }

    #[test]
    fn errors_are_itemized() {
        let mut v = base();
        v["flow"]["cfl"] = serde_json::json!(2.0);
        v["settings"]["t_final"] = serde_json::json!(0.0);
        v["schema_version"] = serde_json::json!(7);
        let e = ScenarioConfig::from_json(&v.to_string()).unwrap_err();
        assert_eq!(e.0.len(), 3, "{e}");
    }

    #[test]
    fn gauge_times_must_sit_on_the_step_lattice() {
        let mut v = base();
        v["scenario"] = serde_json::json!("gauge_check");
        v["tower"] = serde_json::json!({"s_max": 40.0, "ds": 0.05, "tail_tol": 1e-8});
        v["settings"] = serde_json::json!({
            "t": 0.5, "dt": 0.01, "w_times": [0.1, 0.205], "knob_ds": 0.1, "knob_tail_tol": 3e-4,
            "reference_tol": 1e-11, "reference_s_cap": 100.0, "invariance_samples": 2
        });
        let e = ScenarioConfig::from_json(&v.to_string()).unwrap_err();
        assert_eq!(e.0, vec!["settings.w_times[1]: 0.205 is not a multiple of settings.dt".to_string()]);
        v["settings"]["w_times"] = serde_json::json!([0.1, 0.2]);
        assert!(ScenarioConfig::from_json(&v.to_string()).is_ok());
    }
}
