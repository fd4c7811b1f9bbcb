//! Caloric-gauge checks on a slice family of one LL run.

use super::{grid_label, initial, target, RunError};
use crate::config::{on_lattice, GaugeCheckSettings, ScenarioConfig, Settings};
use crate::criteria::*;
use crate::summary::{Artifacts, Property, Summary};
use hypflow::fields::norms::lp_of_magnitudes;
use hypflow::fields::{Dir, Norm};
use hypflow::flows::{FlowKind, FlowState, Stepper};
use hypflow::gauge::{
    build_heat_tower, caloric_frames, connection_from_frame, connection_from_integral, evolution_residuals,
    frame_components, gauge_residuals, heat_limit, interior_l2, CaloricFamily, Frame, GaugeBundle,
    GaugeResiduals, TowerSpec,
};
use hypflow::report::TaggedResiduals;
use hypflow::{Grid, MapField, TangentField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Index `k` with `k dt = t`; validation keeps `t` on the lattice.
fn lattice_index(t: f64, dt: f64) -> usize {
    debug_assert!(on_lattice(t, dt));
    (t / dt).round() as usize
}

fn difference(grid: Grid, a: &[f64], b: &[f64], scale: f64) -> TangentField {
    TangentField { grid, data: a.iter().zip(b).map(|(x, y)| (x - y) * scale).collect() }
}

/// LL states at `k dt` for `k = 0..=n`.
fn lattice_states(cfg: &ScenarioConfig, grid: Grid, dt: f64, n: usize) -> Result<Vec<MapField>, RunError> {
    let u0 = initial(cfg, &target(cfg, grid))?;
    let traj = Stepper::new(FlowKind::LandauLifshitz, cfg.flow, grid)?.evolve(&FlowState::new(u0), n as f64 * dt, n, None)?;
    Ok(traj.states.into_iter().map(|s| s.u).collect())
}

/// One row of the `w` table: residuals at flow time `t` on the `s = 0`
/// slice and the budget `|z| heat_tension + (4/3) ||phi_t(dt) - phi_t(2 dt)||`.
fn w_row(states: &[MapField], k: usize, dt: f64, cfg: &ScenarioConfig) -> hypflow::Result<(GaugeResiduals, f64)> {
    let u = &states[k];
    let frame = Frame::theta(u);
    let v1 = difference(u.grid, &states[k + 1].data, &states[k - 1].data, 0.5 / dt);
    let v2 = difference(u.grid, &states[k + 2].data, &states[k - 2].data, 0.25 / dt);
    let b = GaugeBundle::assemble(u, &frame, &v1, vec![0.0; u.grid.len()])?;
    let r = gauge_residuals(&b, &cfg.flow);
    let d = frame_components(&difference(u.grid, &v1.data, &v2.data, 1.0), u, &frame)?;
    let fd = 4.0 / 3.0 * interior_l2(&b, |x| d[x]);
    Ok((r, cfg.flow.z_abs() * r.heat_tension + fd))
}

/// Frame-route minus integral-route `(A_1, A_2)` at `s = 0`.
struct Gap {
    grid: Grid,
    a: [Vec<f64>; 2],
}

impl Gap {
    fn norm(&self) -> f64 {
        let m: Vec<f64> = self.a[0].iter().zip(&self.a[1]).map(|(x, y)| x.hypot(*y)).collect();
        lp_of_magnitudes(&self.grid, &m, Norm::L2)
    }

    /// Values at the nodes of `coarse`, a grid this one refines.
    fn restricted(&self, coarse: Grid) -> Gap {
        let pick = |v: &[f64]| -> Vec<f64> {
            (0..coarse.len())
                .map(|k| {
                    let (i, j) = coarse.coords(k);
                    v[self.grid.idx(2 * i, 2 * j)]
                })
                .collect()
        };
        Gap { grid: coarse, a: [pick(&self.a[0]), pick(&self.a[1])] }
    }

    /// `(self - other) * factor`.
    fn richardson(&self, other: &Gap, factor: f64) -> Gap {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * factor).collect();
        Gap { grid: self.grid, a: [f(&self.a[0], &other.a[0]), f(&self.a[1], &other.a[1])] }
    }
}

fn connection_gap(u: &MapField, spec: &TowerSpec, st: &GaugeCheckSettings) -> hypflow::Result<Gap> {
    let tower = build_heat_tower(u, spec, 0.0)?;
    let frames = caloric_frames(&tower, &Frame::theta(tower.limit()))?;
    let (qref, _) = heat_limit(tower.limit(), st.reference_tol, st.reference_s_cap, 0.5)?;
    let ic = connection_from_integral(&tower, &qref, None, spec.tail_tol)?;
    let f1 = connection_from_frame(u, &frames[0], Dir::X1)?;
    let f2 = connection_from_frame(u, &frames[0], Dir::X2)?;
    let sub = |a: Vec<f64>, b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok(Gap { grid: u.grid, a: [sub(f1, &ic.a1[0]), sub(f2, &ic.a2[0])] })
}

fn random_rotation(grid: Grid, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let modes: Vec<[f64; 4]> = (0..3)
        .map(|_| {
            [
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ]
        })
        .collect();
    (0..grid.len())
        .map(|k| {
            let p = {
                let (i, j) = grid.coords(k);
                grid.point(i, j)
            };
            modes.iter().map(|m| m[0] * (m[1] * p.x1 + m[2] * p.x2 + m[3]).sin()).sum()
        })
        .collect()
}

pub(super) fn gauge_check(cfg: &ScenarioConfig, art: &mut Artifacts, sum: &mut Summary) -> Result<(), RunError> {
    let Settings::GaugeCheck(st) = &cfg.settings else { unreachable!() };
    let spec = cfg.tower.expect("validated");
    let kt = lattice_index(st.t, st.dt);
    let kw: Vec<usize> = st.w_times.iter().map(|t| lattice_index(*t, st.dt)).collect();
    let n = kw.iter().copied().max().unwrap().max(kt) + 2;
    let grids = [cfg.grid, cfg.grid.refined()];

    let mut slices: Vec<Vec<GaugeResiduals>> = Vec::new();
    let mut u_at_t = Vec::new();
    let mut w_worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (g, grid) in grids.into_iter().enumerate() {
        let label = grid_label(g);
        let states = lattice_states(cfg, grid, st.dt, n)?;

        let mut w_rows = Vec::new();
        for (&k, &t) in kw.iter().zip(&st.w_times) {
            let (r, budget) = w_row(&states, k, st.dt, cfg)?;
            w_worst = w_worst.max(r.w_norm / budget);
            w_rows.push(vec![t, r.torsion, r.commutator, r.w_norm, r.heat_tension, r.at_limit, budget]);
        }
        art.table(
            &format!("w_along_flow_{label}.csv"),
            &["t", "torsion", "commutator", "w_norm", "heat_tension", "At_limit", "w_budget"],
            w_rows,
        )?;

        let fam = CaloricFamily::build([&states[kt - 1], &states[kt], &states[kt + 1]], st.t, st.dt, &spec)?;
        let mut rows = Vec::with_capacity(fam.len());
        let mut tagged = Vec::with_capacity(fam.len());
        for k in 0..fam.len() {
            let b = fam.bundle(k)?;
            if g == 0 && cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0 {
                art.bundle(&format!("snapshots/bundle_{k:04}.dump"), &b)?;
            }
            let r = gauge_residuals(&b, &cfg.flow);
            tagged.push(TaggedResiduals { at: fam.centre().s_grid[k], residuals: r });
            rows.push(r);
        }
        art.csv(&format!("gauge_residuals_{label}.csv"), &tagged)?;
        art.csv(&format!("evolution_{label}.csv"), &evolution_residuals(&fam, &cfg.flow)?)?;

        let at_end = rows.last().unwrap().at_limit;
        sum.metric(&format!("s_end_{label}"), fam.centre().s_end());
        sum.metric(&format!("max_As_{label}"), fam.max_as());
        sum.check(Property::at_most(
            6,
            &format!("|A_t| at the end of the tower ({label})"),
            at_end,
            AT_TAIL_MULTIPLE * spec.tail_tol,
        ));

        if g == 0 {
            let u = &fam.centre().u_of_s[0];
            let b = fam.bundle(0)?;
            let r0 = gauge_residuals(&b, &cfg.flow);
            let mut worst = 0.0f64;
            for _ in 0..st.invariance_samples {
                let chi = random_rotation(grid, &mut rng);
                let rotated = GaugeBundle::assemble(u, &fam.frames[1][0].rotated(u, &chi), &fam.velocity(0), fam.at(0))?;
                let r1 = gauge_residuals(&rotated, &cfg.flow);
                for (x, y) in [
                    (r0.torsion, r1.torsion),
                    (r0.commutator, r1.commutator),
                    (r0.w_norm, r1.w_norm),
                    (r0.heat_tension, r1.heat_tension),
                ] {
                    worst = worst.max((x - y).abs());
                }
            }
            sum.check(Property::at_most(5, "residual change under random frame rotations", worst, GAUGE_INVARIANCE_TOL));
        }
        slices.push(rows);
        u_at_t.push(states[kt].clone());
    }

    let common = slices[0].len().min(slices[1].len());
    let ratio = |f: fn(&GaugeResiduals) -> f64| {
        (0..common)
            .map(|k| f(&slices[0][k]) / f(&slices[1][k]))
            .fold(f64::INFINITY, f64::min)
    };
    sum.metric("compared_slices", common as f64);
    sum.check(Property::at_least(5, "smallest per-slice torsion reduction", ratio(|r| r.torsion), GAUGE_REFINEMENT_MIN));
    sum.check(Property::at_least(5, "smallest per-slice commutator reduction", ratio(|r| r.commutator), GAUGE_REFINEMENT_MIN));
    sum.check(Property::at_most(5, "largest w over its budget along the flow", w_worst, W_BUDGET_FACTOR));

    // Two-route connection study: each knob refined alone.
    let knob = TowerSpec { s_max: spec.s_max, ds: st.knob_ds, tail_tol: st.knob_tail_tol };
    let base = connection_gap(&u_at_t[0], &knob, st)?;
    let fine_h = connection_gap(&u_at_t[1], &knob, st)?.restricted(grids[0]);
    let fine_s = connection_gap(&u_at_t[0], &TowerSpec { ds: 0.5 * knob.ds, ..knob }, st)?;
    let fine_t = connection_gap(&u_at_t[0], &TowerSpec { tail_tol: 0.1 * knob.tail_tol, ..knob }, st)?;
    let e = [
        base.richardson(&fine_h, 4.0 / 3.0).norm(),
        base.richardson(&fine_s, 4.0 / 3.0).norm(),
        base.richardson(&fine_t, 10.0 / 9.0).norm(),
    ];
    let gap = base.norm();
    let mut table = vec![vec![grids[0].n1 as f64, knob.ds, knob.tail_tol, gap]];
    for (name, g, row) in [
        ("h", &fine_h, vec![grids[1].n1 as f64, knob.ds, knob.tail_tol]),
        ("ds", &fine_s, vec![grids[0].n1 as f64, 0.5 * knob.ds, knob.tail_tol]),
        ("tail", &fine_t, vec![grids[0].n1 as f64, knob.ds, 0.1 * knob.tail_tol]),
    ] {
        let v = g.norm();
        sum.check(Property::at_most(6, &format!("connection gap with {name} refined alone"), v, gap));
        table.push([row, vec![v]].concat());
    }
    art.table("connection_knobs.csv", &["n", "ds", "tail_tol", "gap_l2"], table)?;
    sum.metric("connection_gap", gap);
    sum.metric("budget_h", e[0]);
    sum.metric("budget_ds", e[1]);
    sum.metric("budget_tail", e[2]);
    sum.check(Property::at_most(
        6,
        "connection gap over its knob budget",
        gap / (e[0] + e[1] + e[2]),
        CONNECTION_BUDGET_FACTOR,
    ));
    Ok(())
}
