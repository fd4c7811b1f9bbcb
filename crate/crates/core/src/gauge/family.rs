//! Towers launched from three nearby times of one flow, giving the
//! `t`-derivatives needed for `phi_t`, `A_t` and the evolution equations.

use super::bundle::{frame_components, link_between, GaugeBundle};
use super::frame::{caloric_frames, Frame};
use super::residuals::z_of;
use super::tower::{build_heat_tower, build_heat_tower_fixed, HeatTower, TowerSpec};
use crate::error::Result;
use crate::fields::{tension_field, MapField, TangentField};
use crate::flows::FlowParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct CaloricFamily {
    /// Offset between the three source times.
    pub dt: f64,
    /// Towers from `u(t - dt)`, `u(t)`, `u(t + dt)`.
    pub towers: [HeatTower; 3],
    pub frames: [Vec<Frame>; 3],
}

impl CaloricFamily {
    /// The centre tower stops adaptively per `spec`; the side towers use its
    /// checkpoint grid.
    pub fn build(states: [&MapField; 3], t: f64, dt: f64, spec: &TowerSpec) -> Result<Self> {
        let centre = build_heat_tower(states[1], spec, t)?;
        let m = centre.len() - 1;
        let lower = build_heat_tower_fixed(states[0], spec.ds, m, t - dt)?;
        let upper = build_heat_tower_fixed(states[2], spec.ds, m, t + dt)?;
        let towers = [lower, centre, upper];
        let frames = [
            caloric_frames(&towers[0], &Frame::theta(towers[0].limit()))?,
            caloric_frames(&towers[1], &Frame::theta(towers[1].limit()))?,
            caloric_frames(&towers[2], &Frame::theta(towers[2].limit()))?,
        ];
        Ok(Self { dt, towers, frames })
    }

    pub fn len(&self) -> usize {
        self.towers[1].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn centre(&self) -> &HeatTower {
        &self.towers[1]
    }

    /// Centred difference `d_t u` at checkpoint `k`.
    pub fn velocity(&self, k: usize) -> TangentField {
        let (a, b) = (&self.towers[0].u_of_s[k], &self.towers[2].u_of_s[k]);
        TangentField {
            grid: a.grid,
            data: a
                .data
                .iter()
                .zip(&b.data)
                .map(|(x, y)| (y - x) / (2.0 * self.dt))
                .collect(),
        }
    }

    /// `A_t` at checkpoint `k` from the outer frames.
    pub fn at(&self, k: usize) -> Vec<f64> {
        link_between(
            &self.towers[0].u_of_s[k],
            &self.frames[0][k],
            &self.towers[2].u_of_s[k],
            &self.frames[2][k],
        )
        .into_iter()
        .map(|a| a / (2.0 * self.dt))
        .collect()
    }

    /// Bundle on the centre tower at checkpoint `k`.
    pub fn bundle(&self, k: usize) -> Result<GaugeBundle> {
        GaugeBundle::assemble(&self.towers[1].u_of_s[k], &self.frames[1][k], &self.velocity(k), self.at(k))
    }

    /// Bundle at checkpoint `k` with `phi_t` from a given velocity, such
    /// as the flow's right-hand side at `s = 0`.
    pub fn bundle_with_velocity(&self, k: usize, v: &TangentField) -> Result<GaugeBundle> {
        GaugeBundle::assemble(&self.towers[1].u_of_s[k], &self.frames[1][k], v, self.at(k))
    }

    /// `max |A_s|` over nodes and checkpoint intervals of the centre tower.
    pub fn max_as(&self) -> f64 {
        let t = &self.towers[1];
        (0..t.len() - 1)
            .map(|c| {
                link_between(&t.u_of_s[c], &self.frames[1][c], &t.u_of_s[c + 1], &self.frames[1][c + 1])
                    .into_iter()
                    .fold(0.0, |m: f64, a| m.max(a.abs()))
                    / (t.s_grid[c + 1] - t.s_grid[c])
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRow {
    pub s: f64,
    /// Residual of the `D_t phi_s` equation.
    pub heat_tension_eq: f64,
    /// The same residual with the curvature term dropped.
    pub heat_tension_eq_flat: f64,
    /// `|| D_t phi_s ||`, the scale of the first equation.
    pub heat_tension_scale: f64,
    /// Residual of the `d_s w` equation.
    pub w_eq: f64,
    /// `|| d_s w ||`, the scale of the second equation.
    pub w_scale: f64,
}

/// Discrete residuals, at every inner checkpoint of the centre tower, of
///
/// `D_t phi_s = z L phi_s + d_s w + z i h^{ij} (phi_s wedge phi_i) phi_j`,
/// `d_s w = L w + i h^{ij} (phi_t wedge phi_i) phi_j - z i h^{ij} (phi_s wedge phi_i) phi_j`,
///
/// with `L psi = h^{ij} D_i D_j psi - h^{ij} Gamma^k_ij D_k psi` and
/// `w = phi_t - z phi_s`, which equals the tension form of `w` by the heat
/// tension identity but carries no second-order stencil mismatch, so that
/// its own derivatives stay consistent. Norms are weighted L2 over the
/// interior nodes.
pub fn evolution_residuals(family: &CaloricFamily, params: &FlowParams) -> Result<Vec<EvolutionRow>> {
    let z = z_of(params);
    let m = family.len();
    let bundles: Vec<GaugeBundle> = (0..m).map(|k| family.bundle(k)).collect::<Result<_>>()?;
    let grid = bundles[0].grid;
    let w: Vec<Vec<Complex64>> = bundles
        .iter()
        .map(|b| b.phit.iter().zip(&b.phis).map(|(t, s)| t - z * s).collect())
        .collect();
    let side_phis = |side: usize, k: usize| -> Result<Vec<Complex64>> {
        let u = &family.towers[side].u_of_s[k];
        frame_components(&tension_field(u), u, &family.frames[side][k])
    };
    let weight = |x: usize| {
        let (_, j) = grid.coords(x);
        grid.h1() * grid.h2() * (-grid.x2(j)).exp()
    };
    let mut rows = Vec::new();
    for k in 1..m.saturating_sub(1) {
        let b = &bundles[k];
        let lo = side_phis(0, k)?;
        let hi = side_phis(2, k)?;
        let centre = &family.towers[1].u_of_s[k];
        let up = link_between(centre, &family.frames[1][k], &family.towers[2].u_of_s[k], &family.frames[2][k]);
        let down = link_between(&family.towers[0].u_of_s[k], &family.frames[0][k], centre, &family.frames[1][k]);
        let ds = family.towers[1].s_grid[k + 1] - family.towers[1].s_grid[k - 1];
        let mut acc = [0.0; 5];
        for x in b.interior() {
            let dt_phis = (Complex64::from_polar(1.0, up[x]) * hi[x]
                - Complex64::from_polar(1.0, -down[x]) * lo[x])
                / (2.0 * family.dt);
            let ds_w = (w[k + 1][x] - w[k - 1][x]) / ds;
            let curv_s = b.curvature_term(b.phis[x], x);
            let flat = dt_phis - z * b.covariant_laplacian(&b.phis, x) - ds_w;
            let full = flat - z * curv_s;
            let wt = weight(x);
            acc[0] += wt * full.norm_sqr();
            acc[1] += wt * flat.norm_sqr();
            acc[2] += wt * dt_phis.norm_sqr();
            let r = ds_w - b.covariant_laplacian(&w[k], x) - b.curvature_term(b.phit[x], x) + z * curv_s;
            acc[3] += wt * r.norm_sqr();
            acc[4] += wt * ds_w.norm_sqr();
        }
        rows.push(EvolutionRow {
            s: family.towers[1].s_grid[k],
            heat_tension_eq: acc[0].sqrt(),
            heat_tension_eq_flat: acc[1].sqrt(),
            heat_tension_scale: acc[2].sqrt(),
            w_eq: acc[3].sqrt(),
            w_scale: acc[4].sqrt(),
        });
    }
    Ok(rows)
}
