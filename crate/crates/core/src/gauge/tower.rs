//! Heat towers: the harmonic-map heat flow in the auxiliary time `s`.

use crate::error::{Error, Result};
use crate::fields::norms::tangent_magnitudes;
use crate::fields::MapField;
use crate::flows::{FlowKind, FlowParams, FlowState, Stepper};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    /// Largest admissible final `s`.
    pub s_max: f64,
    /// Checkpoint stride in `s`.
    pub ds: f64,
    /// Target for `max_x |d_s u|` at the final checkpoint.
    pub tail_tol: f64,
}

impl TowerSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: String| {
            Err(Error::InvalidParam {
                field: field.into(),
                reason,
            })
        };
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return bad("tower.s_max", format!("must be finite and > 0, got {}", self.s_max));
        }
        if !(self.ds > 0.0) {
            return bad("tower.ds", format!("must be > 0, got {}", self.ds));
        }
        if self.ds > self.s_max {
            return bad("tower.ds", format!("ds = {} exceeds s_max = {}", self.ds, self.s_max));
        }
        if !(self.tail_tol > 0.0) {
            return bad("tower.tail_tol", format!("must be > 0, got {}", self.tail_tol));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct HeatTower {
    pub s_grid: Vec<f64>,
    pub u_of_s: Vec<MapField>,
    pub source_time: f64,
    /// `max_x |d_s u|` at each checkpoint.
    pub sup_velocity: Vec<f64>,
    /// Exponential rate fitted to `sup_velocity` over the final decade.
    pub decay_rate: f64,
    /// Extrapolated `int_{s_end}^inf max_x |d_s u| ds`.
    pub tail_bound: f64,
}

impl HeatTower {
    pub fn s_end(&self) -> f64 {
        *self.s_grid.last().unwrap()
    }

    pub fn limit(&self) -> &MapField {
        self.u_of_s.last().unwrap()
    }

    pub fn ds(&self) -> f64 {
        self.s_grid[1] - self.s_grid[0]
    }

    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }
}

fn sup_velocity(stepper: &mut Stepper, s: &FlowState) -> f64 {
    let v = stepper.velocity(s);
    tangent_magnitudes(&v, &s.u)
        .expect("same grid")
        .into_iter()
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ln y` against `s` over the points within one
/// decade of the last value, returned as a positive decay rate.
pub fn fit_decay_rate(s: &[f64], y: &[f64]) -> f64 {
    let last = *y.last().unwrap();
    let start = y
        .iter()
        .rposition(|&v| v > 10.0 * last)
        .map_or(0, |i| i + 1)
        .min(y.len().saturating_sub(2));
    let pts: Vec<(f64, f64)> = s[start..]
        .iter()
        .zip(&y[start..])
        .filter(|(_, &v)| v > 0.0)
        .map(|(&a, &b)| (a, b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let ms = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - ms) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - ms) * (p.0 - ms)).sum();
    -cov / var
}

fn finish(
    s_grid: Vec<f64>,
    u_of_s: Vec<MapField>,
    sup: Vec<f64>,
    source_time: f64,
) -> HeatTower {
    let rate = fit_decay_rate(&s_grid, &sup);
    let last = *sup.last().unwrap();
    let tail = if last == 0.0 {
        0.0
    } else if rate > 0.0 {
        last / rate
    } else {
        f64::INFINITY
    };
    HeatTower {
        s_grid,
        u_of_s,
        source_time,
        sup_velocity: sup,
        decay_rate: rate,
        tail_bound: tail,
    }
}

/// Runs the heat flow from `u` with checkpoints every `spec.ds`, stopping
/// at the first checkpoint where `max_x |d_s u| < spec.tail_tol`.
pub fn build_heat_tower(u: &MapField, spec: &TowerSpec, source_time: f64) -> Result<HeatTower> {
    spec.validate()?;
    let mut stepper = Stepper::new(FlowKind::Heat, FlowParams::heat(), u.grid)?;
    let steps = (spec.ds / stepper.admissible_dt()).ceil().max(1.0) as usize;
    let dt = spec.ds / steps as f64;
    let mut cur = FlowState::new(u.clone());
    let mut s_grid = vec![0.0];
    let mut maps = vec![u.clone()];
    let mut sup = vec![sup_velocity(&mut stepper, &cur)];
    let mut k = 0usize;
    while *sup.last().unwrap() >= spec.tail_tol {
        if (k + 1) as f64 * spec.ds > spec.s_max * (1.0 + 1e-12) {
            return Err(Error::TowerNotConverged {
                s_max: spec.s_max,
                residual: *sup.last().unwrap(),
                tol: spec.tail_tol,
            });
        }
        stepper.advance_state(&mut cur, dt, steps)?;
        k += 1;
        s_grid.push(k as f64 * spec.ds);
        maps.push(cur.u.clone());
        sup.push(sup_velocity(&mut stepper, &cur));
    }
    Ok(finish(s_grid, maps, sup, source_time))
}

/// Heat tower with a prescribed number of checkpoints, for families of
/// towers that must share one `s` grid.
pub fn build_heat_tower_fixed(
    u: &MapField,
    ds: f64,
    checkpoints: usize,
    source_time: f64,
) -> Result<HeatTower> {
    let mut stepper = Stepper::new(FlowKind::Heat, FlowParams::heat(), u.grid)?;
    let steps = (ds / stepper.admissible_dt()).ceil().max(1.0) as usize;
    let dt = ds / steps as f64;
    let mut cur = FlowState::new(u.clone());
    let mut s_grid = vec![0.0];
    let mut maps = vec![u.clone()];
    let mut sup = vec![sup_velocity(&mut stepper, &cur)];
    for k in 1..=checkpoints {
        stepper.advance_state(&mut cur, dt, steps)?;
        s_grid.push(k as f64 * ds);
        maps.push(cur.u.clone());
        sup.push(sup_velocity(&mut stepper, &cur));
    }
    Ok(finish(s_grid, maps, sup, source_time))
}

/// Heat-flow limit of `u`: evolves without storing checkpoints until
/// `max_x |d_s u| < tol`, checking every `check_every` units of `s`.
pub fn heat_limit(u: &MapField, tol: f64, s_cap: f64, check_every: f64) -> Result<(MapField, f64)> {
    let mut stepper = Stepper::new(FlowKind::Heat, FlowParams::heat(), u.grid)?;
    let steps = (check_every / stepper.admissible_dt()).ceil().max(1.0) as usize;
    let dt = check_every / steps as f64;
    let mut cur = FlowState::new(u.clone());
    let mut s = 0.0;
    loop {
        let r = sup_velocity(&mut stepper, &cur);
        if r < tol {
            return Ok((cur.u, s));
        }
        if s + check_every > s_cap * (1.0 + 1e-12) {
            return Err(Error::TowerNotConverged {
                s_max: s_cap,
                residual: r,
                tol,
            });
        }
        stepper.advance_state(&mut cur, dt, steps)?;
        s += check_every;
    }
}
