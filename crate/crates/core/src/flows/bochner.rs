//! Discrete checks of the parabolic Bochner inequalities along a heat flow.
//!
//! For a field `X` along the flow the monitored quantity is
//! `(d_s - Delta) |X|^2 + c |nabla X|^2`, with `d_s` a centered difference
//! between checkpoints. Nodes within two cells of the boundary ring are
//! skipped because nested one-sided stencils are only first order there.

use super::energy::covariant_gradient_sq;
use super::rhs::heat_rhs;
use crate::error::Result;
use crate::fields::norms::tangent_magnitudes;
use crate::fields::{
    energy_density, laplace_beltrami, partial, pullback_covariant_derivative, Dir, Grid, MapField,
    ScalarField, TangentField,
};
use crate::geometry::metric_at;
use serde::Serialize;

const MARGIN: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct BochnerReport {
    pub s: Vec<f64>,
    /// `max_x |d_s u|` at each checkpoint.
    pub sup_velocity: Vec<f64>,
    /// Largest increase of `sup_velocity` between consecutive checkpoints.
    pub max_sup_increase: f64,
    /// Largest value of `(d_s - Delta)|d_s u|^2 + 2 |nabla d_s u|^2`.
    pub velocity_defect: f64,
    /// Size of the terms entering `velocity_defect`, for scale.
    pub velocity_scale: f64,
    /// Smallest `K` with `(d_s - Delta)|du|^2 + 2|nabla du|^2 <= K e(u)` on
    /// nodes where `e(u)` is not negligible.
    pub curvature_constant: f64,
}

/// Maximum of the parabolic defect and of the magnitude of its terms.
pub fn parabolic_defect(
    s: &[f64],
    squares: &[Vec<f64>],
    grad_sq: &[Vec<f64>],
    grid: &Grid,
    grad_weight: f64,
) -> (f64, f64) {
    let mut worst = f64::NEG_INFINITY;
    let mut scale: f64 = 0.0;
    for k in 1..s.len().saturating_sub(1) {
        let lap = laplace_beltrami(&ScalarField {
            grid: *grid,
            values: squares[k].clone(),
        });
        let inv = 1.0 / (s[k + 1] - s[k - 1]);
        for j in MARGIN..grid.n2 - MARGIN {
            for i in MARGIN..grid.n1 - MARGIN {
                let n = grid.idx(i, j);
                let ds = (squares[k + 1][n] - squares[k - 1][n]) * inv;
                let v = ds - lap.values[n] + grad_weight * grad_sq[k][n];
                worst = worst.max(v);
                scale = scale.max(ds.abs() + lap.values[n].abs() + grad_weight * grad_sq[k][n]);
            }
        }
    }
    (if worst.is_finite() { worst } else { 0.0 }, scale)
}

/// `|nabla du|^2` with the Hessian `nabla_i d_j u - Gamma^k_ij d_k u`.
pub fn hessian_sq(u: &MapField) -> Result<Vec<f64>> {
    let g = u.grid;
    let d = |dir: Dir| {
        TangentField::from_components(g, partial(&g, u.u1(), dir), partial(&g, u.u2(), dir))
    };
    let (d1, d2) = (d(Dir::X1)?, d(Dir::X2)?);
    let h11 = pullback_covariant_derivative(&d1, u, Dir::X1)?;
    let h12 = pullback_covariant_derivative(&d2, u, Dir::X1)?;
    let h21 = pullback_covariant_derivative(&d1, u, Dir::X2)?;
    let h22 = pullback_covariant_derivative(&d2, u, Dir::X2)?;
    Ok((0..g.len())
        .map(|k| {
            let (_, j) = g.coords(k);
            let x2 = g.x2(j);
            let w = (2.0 * x2).exp();
            let m = metric_at(u.point(k));
            let (a, b) = (d1.at(k), d2.at(k));
            let e = (-2.0 * x2).exp();
            let c11 = [h11.at(k)[0] - e * b[0], h11.at(k)[1] - e * b[1]];
            let c12 = [h12.at(k)[0] + a[0], h12.at(k)[1] + a[1]];
            let c21 = [h21.at(k)[0] + a[0], h21.at(k)[1] + a[1]];
            let c22 = h22.at(k);
            w * w * m.inner(c11, c11) + w * (m.inner(c12, c12) + m.inner(c21, c21)) + m.inner(c22, c22)
        })
        .collect())
}

/// Monitors for a heat-flow trajectory given by checkpoint parameters `s`
/// and maps `u`.
pub fn bochner_monitor(s: &[f64], u: &[MapField]) -> Result<BochnerReport> {
    let grid = u[0].grid;
    let mut sup = Vec::with_capacity(u.len());
    let mut vel_sq = Vec::with_capacity(u.len());
    let mut vel_grad = Vec::with_capacity(u.len());
    let mut du_sq = Vec::with_capacity(u.len());
    let mut hess = Vec::with_capacity(u.len());
    let mut dens = Vec::with_capacity(u.len());
    for m in u {
        let v = heat_rhs(m);
        let mag = tangent_magnitudes(&v, m)?;
        sup.push(mag.iter().fold(0.0f64, |a, &b| a.max(b)));
        vel_sq.push(mag.iter().map(|x| x * x).collect::<Vec<_>>());
        vel_grad.push(covariant_gradient_sq(&v, m)?);
        let e = energy_density(m).values;
        du_sq.push(e.iter().map(|x| 2.0 * x).collect::<Vec<_>>());
        hess.push(hessian_sq(m)?);
        dens.push(e);
    }
    let max_sup_increase = sup
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let (velocity_defect, velocity_scale) = parabolic_defect(s, &vel_sq, &vel_grad, &grid, 2.0);

    let mut kmax: f64 = 0.0;
    for k in 1..s.len().saturating_sub(1) {
        let lap = laplace_beltrami(&ScalarField {
            grid,
            values: du_sq[k].clone(),
        });
        let inv = 1.0 / (s[k + 1] - s[k - 1]);
        let emax = dens[k].iter().fold(0.0f64, |a, &b| a.max(b));
        for j in MARGIN..grid.n2 - MARGIN {
            for i in MARGIN..grid.n1 - MARGIN {
                let n = grid.idx(i, j);
                if dens[k][n] <= 1e-6 * emax {
                    continue;
                }
                let lhs = (du_sq[k + 1][n] - du_sq[k - 1][n]) * inv - lap.values[n] + 2.0 * hess[k][n];
                kmax = kmax.max(lhs / dens[k][n]);
            }
        }
    }
    Ok(BochnerReport {
        s: s.to_vec(),
        sup_velocity: sup,
        max_sup_increase,
        velocity_defect,
        velocity_scale,
        curvature_constant: kmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{FlowKind, FlowParams, FlowState, Stepper};
    use crate::geometry::ChartPoint;

    fn grid(n: usize) -> Grid {
        Grid::new((-2.0, 2.0), (-1.5, 1.5), n, n).unwrap()
    }

    #[test]
    fn constant_trajectory_is_silent() {
        let g = grid(12);
        let c = MapField::constant(g, ChartPoint::new(0.3, 0.3));
        let r = bochner_monitor(&[0.0, 0.1, 0.2], &[c.clone(), c.clone(), c]).unwrap();
        assert!(r.sup_velocity.iter().all(|v| *v == 0.0));
        assert_eq!(r.velocity_defect, 0.0);
        assert_eq!(r.max_sup_increase, 0.0);
        assert_eq!(r.curvature_constant, 0.0);
    }

    #[test]
    fn hessian_of_identity_vanishes() {
        let u = MapField::identity(grid(14));
        assert!(hessian_sq(&u).unwrap().iter().all(|v| v.abs() < 1e-18));
    }

    #[test]
    fn heat_flow_satisfies_maximum_principle() {
        let g = grid(25);
        let u0 = MapField::from_fn(g, |p| {
            let r2 = p.x1 * p.x1 + p.x2 * p.x2;
            let b = if r2 < 1.0 { (1.0 - r2).powi(3) } else { 0.0 };
            ChartPoint::new(0.5 * p.x1 + 0.2 * b, 0.5 * p.x2 + 0.1 * b)
        });
        let mut st = Stepper::new(FlowKind::Heat, FlowParams::heat(), g).unwrap();
        let tr = st.evolve(&FlowState::new(u0), 0.4, 20, None).unwrap();
        let maps: Vec<_> = tr.states.iter().map(|s| s.u.clone()).collect();
        let r = bochner_monitor(&tr.times(), &maps).unwrap();
        assert!(r.max_sup_increase <= 1e-8, "{}", r.max_sup_increase);
        assert!(r.velocity_defect <= 0.05 * r.velocity_scale, "{} vs {}", r.velocity_defect, r.velocity_scale);
        assert!(r.curvature_constant.is_finite());
    }
}
