//! Weighted norms with the volume density `e^{-x2}`.
//!
//! Quadrature is the tensor trapezoid rule; sums run in node order so the
//! result does not depend on how the caller computed the field.

use super::{check_same_grid, Grid, MapField, ScalarField, TangentField};
use crate::error::Result;
use crate::geometry::geodesic_distance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

/// Quadrature weights `sqrt_det * h1 * h2` with trapezoid end corrections.
pub fn quadrature_weights(grid: &Grid) -> Vec<f64> {
    let (h1, h2) = (grid.h1(), grid.h2());
    let mut w = Vec::with_capacity(grid.len());
    for j in 0..grid.n2 {
        let cj = if j == 0 || j == grid.n2 - 1 { 0.5 } else { 1.0 };
        let sd = (-grid.x2(j)).exp();
        for i in 0..grid.n1 {
            let ci = if i == 0 || i == grid.n1 - 1 { 0.5 } else { 1.0 };
            w.push(ci * cj * sd * h1 * h2);
        }
    }
    w
}

/// Integral of nodal values against the volume element.
pub fn integrate(grid: &Grid, values: &[f64]) -> f64 {
    quadrature_weights(grid)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Norm of pointwise magnitudes `m(x) >= 0`.
pub fn lp_of_magnitudes(grid: &Grid, m: &[f64], p: Norm) -> f64 {
    match p {
        Norm::Inf => m.iter().fold(0.0, |a, &b| a.max(b.abs())),
        Norm::L1 => integrate(grid, &m.iter().map(|v| v.abs()).collect::<Vec<_>>()),
        Norm::L2 => integrate(grid, &m.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt(),
    }
}

pub fn lp_norm_scalar(f: &ScalarField, p: Norm) -> f64 {
    lp_of_magnitudes(&f.grid, &f.values, p)
}

/// Pointwise `|X|_g` at `u(x)`.
pub fn tangent_magnitudes(x: &TangentField, u: &MapField) -> Result<Vec<f64>> {
    check_same_grid(&x.grid, &u.grid)?;
    Ok((0..x.grid.len())
        .map(|k| {
            let [a, b] = x.at(k);
            let t = (-u.u2()[k]).exp() * a;
            (t * t + b * b).sqrt()
        })
        .collect())
}

pub fn lp_norm_tangent(x: &TangentField, u: &MapField, p: Norm) -> Result<f64> {
    Ok(lp_of_magnitudes(&x.grid, &tangent_magnitudes(x, u)?, p))
}

/// Largest pointwise geodesic distance between two maps.
pub fn sup_distance(u: &MapField, q: &MapField) -> Result<f64> {
    check_same_grid(&u.grid, &q.grid)?;
    Ok((0..u.grid.len())
        .map(|k| geodesic_distance(u.point(k), q.point(k)))
        .fold(0.0, f64::max))
}
