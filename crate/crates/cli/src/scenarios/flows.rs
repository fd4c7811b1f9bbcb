//! Flow-level scenarios: stationarity, energy, convergence, shared tower
//! limits and the wave approximation.

use super::{discretization_floor, grid_label, initial, target, RunError};
use crate::config::{ScenarioConfig, Settings};
use crate::criteria::*;
use crate::summary::{Artifacts, Property, Summary};
use hypflow::fields::sup_distance;
use hypflow::flows::{
    bochner_monitor, dirichlet_energy, energy_history, wave_initial_state, FlowKind, FlowParams, FlowState,
    Stepper, Trajectory,
};
use hypflow::gauge::{build_heat_tower, heat_limit, HeatTower};

fn snapshots(cfg: &ScenarioConfig, art: &mut Artifacts, prefix: &str, traj: &Trajectory) -> hypflow::Result<()> {
    if cfg.snapshot_stride == 0 {
        return Ok(());
    }
    for (k, s) in traj.states.iter().enumerate().step_by(cfg.snapshot_stride) {
        art.map(&format!("snapshots/{prefix}_{k:04}.dump"), &s.u)?;
    }
    Ok(())
}

fn tower_table(t: &HeatTower) -> Vec<Vec<f64>> {
    t.s_grid
        .iter()
        .zip(&t.sup_velocity)
        .zip(&t.u_of_s)
        .map(|((s, v), u)| vec![*s, *v, dirichlet_energy(u)])
        .collect()
}

pub(super) fn stationary(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let Settings::Stationary(st) = &cfg.settings else { unreachable!() };
    let mut drifts = Vec::new();
    for (k, grid) in [cfg.grid, cfg.grid.refined()].into_iter().enumerate() {
        let label = grid_label(k);
        let q = target(cfg, grid);
        let floor = discretization_floor(&q, st.limit_tol, st.limit_s_cap)?;
        let mut stepper = Stepper::new(FlowKind::Heat, FlowParams::heat(), grid)?;
        let traj = stepper.evolve(&FlowState::new(q.clone()), st.t_final, st.checkpoints, None)?;
        art.csv(&format!("energy_{label}.csv"), &energy_history(&traj.states, &mut stepper)?)?;
        let rows = traj
            .states
            .iter()
            .map(|s| Ok(vec![s.t, sup_distance(&s.u, &q)?]))
            .collect::<hypflow::Result<Vec<_>>>()?;
        let drift = rows.last().unwrap()[1];
        art.table(&format!("drift_{label}.csv"), &["t", "sup_distance"], rows)?;
        snapshots(cfg, art, label, &traj)?;
        sum.metric(&format!("floor_{label}"), floor);
        sum.metric(&format!("drift_{label}"), drift);
        sum.check(Property::at_most(1, &format!("drift within discretization floor ({label})"), drift, floor));
        drifts.push(drift);
    }
    sum.check(Property::at_least(
        1,
        "drift reduction under refinement",
        drifts[0] / drifts[1],
        STATIONARY_REFINEMENT_MIN,
    ));
    Ok(())
}

pub(super) fn heat_relax(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let spec = cfg.tower.expect("validated");
    let u0 = initial(cfg, &target(cfg, cfg.grid))?;
    let tower = build_heat_tower(&u0, &spec, 0.0)?;
    art.table("tower.csv", &["s", "sup_velocity", "E1"], tower_table(&tower))?;
    let increase = tower
        .sup_velocity
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let boch = bochner_monitor(&tower.s_grid, &tower.u_of_s)?;
    sum.metric("s_end", tower.s_end());
    sum.metric("tail_bound", tower.tail_bound);
    sum.metric("velocity_defect", boch.velocity_defect);
    sum.metric("velocity_scale", boch.velocity_scale);
    sum.metric("curvature_constant", boch.curvature_constant);
    sum.check(Property::at_most(7, "largest increase of max |d_s u|", increase, SUP_VELOCITY_SLACK));
    sum.check(Property::at_least(7, "fitted decay rate over the final decade", tower.decay_rate, DECAY_RATE_MIN));
    Ok(())
}

/// `int_0^T f` and the share of it coming from `[T/2, T]`, by the trapezoid rule.
fn second_half_share(t: &[f64], f: &[f64]) -> (f64, f64) {
    let half = 0.5 * (t[0] + t[t.len() - 1]);
    let (mut all, mut late) = (0.0, 0.0);
    for k in 1..t.len() {
        let piece = 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
        all += piece;
        if t[k - 1] >= half - 1e-12 {
            late += piece;
        }
    }
    (all, late / all)
}

pub(super) fn ll_convergence(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let Settings::LlConvergence(st) = &cfg.settings else { unreachable!() };
    let q = target(cfg, cfg.grid);
    let floor = discretization_floor(&q, st.limit_tol, st.limit_s_cap)?;
    let u0 = initial(cfg, &q)?;
    let (q_heat, s_heat) = heat_limit(&u0, st.limit_tol, st.limit_s_cap, 0.5)?;
    let mut stepper = Stepper::new(FlowKind::LandauLifshitz, cfg.flow, cfg.grid)?;
    let dt_max = st.dt_fraction * stepper.admissible_dt();
    let traj = stepper.evolve(&FlowState::new(u0), st.t_final, st.checkpoints, Some(dt_max))?;
    snapshots(cfg, art, "u", &traj)?;
    let rep = energy_history(&traj.states, &mut stepper)?;
    art.csv("energy.csv", &rep)?;
    let dist = traj
        .states
        .iter()
        .map(|s| sup_distance(&s.u, &q_heat))
        .collect::<hypflow::Result<Vec<_>>>()?;
    art.table(
        "distance.csv",
        &["t", "sup_distance_to_heat_limit"],
        traj.states.iter().zip(&dist).map(|(s, d)| vec![s.t, *d]).collect(),
    )?;
    sum.metric("dt", traj.dt);
    sum.metric("floor", floor);
    sum.metric("heat_limit_s", s_heat);
    sum.metric("heat_limit_to_target", sup_distance(&q_heat, &q)?);
    sum.metric("final_distance", *dist.last().unwrap());

    // Energy.
    let e0 = rep[0].e1;
    let increase = rep.windows(2).map(|w| w[1].e1 - w[0].e1).fold(f64::NEG_INFINITY, f64::max);
    sum.check(Property::at_most(2, "largest E1 increase between checkpoints", increase, ENERGY_ROUNDOFF * e0));
    sum.check(Property::at_most(
        2,
        "integration step as a fraction of the stability bound",
        traj.dt / stepper.params.stability_bound(FlowKind::LandauLifshitz, &cfg.grid),
        0.5,
    ));
    let mut worst = 0.0f64;
    let mut resolved = 0usize;
    for w in rep.windows(2) {
        let drop = w[1].dissipation_rate * (w[1].t - w[0].t);
        if drop >= ENERGY_RESOLUTION * w[1].e1 {
            worst = worst.max(w[1].relative_residual(f64::MIN_POSITIVE));
            resolved += 1;
        }
    }
    sum.metric("resolved_dissipation_intervals", resolved as f64);
    sum.check(Property::at_least(2, "resolved dissipation intervals", resolved as f64, 1.0));
    sum.check(Property::at_most(2, "relative dissipation residual", worst, DISSIPATION_RELATIVE_MAX));

    // Convergence to the heat-flow limit.
    let half = dist.len() / 2;
    let monotone = dist[half..].windows(2).all(|w| w[1] < w[0]);
    sum.check(Property::holds(3, "distance to heat limit decreasing over the second half", monotone));
    sum.check(Property::at_most(
        3,
        "final distance to heat limit",
        *dist.last().unwrap(),
        CONVERGENCE_FLOOR_MULTIPLE * floor,
    ));

    // Time-integral tails: ||u_t||^2 = 2 E2 and ||nabla u_t||^2 = 2 E3.
    let t = traj.times();
    let v2: Vec<f64> = rep.iter().map(|r| 2.0 * r.e2).collect();
    let g2: Vec<f64> = rep.iter().map(|r| 2.0 * r.e3).collect();
    let (iv, sv) = second_half_share(&t, &v2);
    let (ig, sg) = second_half_share(&t, &g2);
    sum.metric("int_velocity_sq", iv);
    sum.metric("int_grad_velocity_sq", ig);
    sum.check(Property::at_most(10, "second-half share of int ||u_t||^2", sv, TIME_TAIL_MAX));
    sum.check(Property::at_most(10, "second-half share of int ||grad u_t||^2", sg, TIME_TAIL_MAX));
    Ok(())
}

pub(super) fn shared_limit(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let Settings::SharedLimit(st) = &cfg.settings else { unreachable!() };
    let spec = cfg.tower.expect("validated");
    let u0 = initial(cfg, &target(cfg, cfg.grid))?;
    let mut stepper = Stepper::new(FlowKind::LandauLifshitz, cfg.flow, cfg.grid)?;
    let dt_max = st.dt_fraction * stepper.admissible_dt();
    let traj = stepper.evolve(&FlowState::new(u0), st.t_final, st.checkpoints, Some(dt_max))?;
    let picks = [0, st.checkpoints / 2, st.checkpoints];
    let mut towers = Vec::new();
    for (i, &k) in picks.iter().enumerate() {
        let s = &traj.states[k];
        let tower = build_heat_tower(&s.u, &spec, s.t)?;
        art.table(&format!("tower_{i}.csv"), &["s", "sup_velocity", "E1"], tower_table(&tower))?;
        sum.metric(&format!("s_end_{i}"), tower.s_end());
        towers.push(tower);
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let d = sup_distance(towers[a].limit(), towers[b].limit())?;
        sum.check(Property::at_most(
            4,
            &format!("limit distance between towers from t = {} and t = {}", towers[a].source_time, towers[b].source_time),
            d,
            SAME_LIMIT_TAIL_MULTIPLE * spec.tail_tol,
        ));
    }
    Ok(())
}

pub(super) fn wave_delta(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let Settings::WaveDelta(st) = &cfg.settings else { unreachable!() };
    let u0 = initial(cfg, &target(cfg, cfg.grid))?;
    let ll = Stepper::new(FlowKind::LandauLifshitz, cfg.flow, cfg.grid)?.evolve(&FlowState::new(u0.clone()), st.t_final, 1, None)?;
    let mut rows = Vec::new();
    for &delta in &st.deltas {
        let p = FlowParams { delta, ..cfg.flow };
        let w = Stepper::new(FlowKind::Wave, p, cfg.grid)?.evolve(&wave_initial_state(&u0, &p), st.t_final, 1, None)?;
        let d = sup_distance(&w.last().u, &ll.last().u)?;
        sum.metric(&format!("distance_delta_{delta:e}"), d);
        rows.push(vec![delta, d]);
    }
    art.table("delta.csv", &["delta", "sup_distance_to_ll"], rows.clone())?;
    for w in rows.windows(2) {
        sum.check(Property::at_most(
            9,
            &format!("distance at delta = {:e} below distance at delta = {:e}", w[1][0], w[0][0]),
            w[1][1],
            w[0][1],
        ));
    }
    Ok(())
}
