//! Finite-difference operators.
//!
//! First derivatives are centered in the interior and one-sided second order
//! on the boundary ring. Operators that feed evolution equations
//! (Laplacian, tension) are evaluated on interior nodes only and vanish on
//! the ring.

use super::{check_same_grid, Dir, Grid, MapField, ScalarField, TangentField};
use crate::error::Result;

/// First derivative of a nodal array along `d`.
pub fn partial(grid: &Grid, f: &[f64], d: Dir) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    partial_into(grid, f, d, &mut out);
    out
}

pub(crate) fn partial_into(grid: &Grid, f: &[f64], d: Dir, out: &mut [f64]) {
    let (n1, n2) = (grid.n1, grid.n2);
    let (stride, n, other) = match d {
        Dir::X1 => (1, n1, n2),
        Dir::X2 => (n1, n2, n1),
    };
    let inv = 1.0 / grid.h(d);
    let half = 0.5 * inv;
    for o in 0..other {
        let base = match d {
            Dir::X1 => o * n1,
            Dir::X2 => o,
        };
        let at = |m: usize| f[base + m * stride];
        out[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * half;
        for m in 1..n - 1 {
            out[base + m * stride] = (at(m + 1) - at(m - 1)) * half;
        }
        out[base + (n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * half;
    }
}

/// Second derivative along `d`; one-sided second order on the ring.
pub fn second_partial(grid: &Grid, f: &[f64], d: Dir) -> Vec<f64> {
    let (n1, n2) = (grid.n1, grid.n2);
    let (stride, n, other) = match d {
        Dir::X1 => (1, n1, n2),
        Dir::X2 => (n1, n2, n1),
    };
    let h = grid.h(d);
    let inv = 1.0 / (h * h);
    let mut out = vec![0.0; grid.len()];
    for o in 0..other {
        let base = match d {
            Dir::X1 => o * n1,
            Dir::X2 => o,
        };
        let at = |m: usize| f[base + m * stride];
        out[base] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * inv;
        for m in 1..n - 1 {
            out[base + m * stride] = (at(m + 1) - 2.0 * at(m) + at(m - 1)) * inv;
        }
        let l = n - 1;
        out[base + l * stride] = (2.0 * at(l) - 5.0 * at(l - 1) + 4.0 * at(l - 2) - at(l - 3)) * inv;
    }
    out
}

/// Row weights `e^{2 x2(j)}`.
pub(crate) fn row_weights(grid: &Grid) -> Vec<f64> {
    (0..grid.n2).map(|j| (2.0 * grid.x2(j)).exp()).collect()
}

/// `e^{2x2} f_11 + f_22 - f_2` on interior nodes, zero on the ring.
pub fn laplace_beltrami(f: &ScalarField) -> ScalarField {
    let mut out = ScalarField::zeros(f.grid);
    laplace_into(&f.grid, &row_weights(&f.grid), &f.values, &mut out.values);
    out
}

pub(crate) fn laplace_into(grid: &Grid, w: &[f64], f: &[f64], out: &mut [f64]) {
    let (n1, n2) = (grid.n1, grid.n2);
    let (h1, h2) = (grid.h1(), grid.h2());
    let (i11, i22, i2) = (1.0 / (h1 * h1), 1.0 / (h2 * h2), 0.5 / h2);
    for j in 0..n2 {
        let row = j * n1;
        if j == 0 || j == n2 - 1 {
            out[row..row + n1].iter_mut().for_each(|v| *v = 0.0);
            continue;
        }
        let a = w[j] * i11;
        out[row] = 0.0;
        out[row + n1 - 1] = 0.0;
        for k in row + 1..row + n1 - 1 {
            let (c, e, wst, n, s) = (f[k], f[k + 1], f[k - 1], f[k + n1], f[k - n1]);
            out[k] = a * (e - 2.0 * c + wst) + i22 * (n - 2.0 * c + s) - i2 * (n - s);
        }
    }
}

/// Tension field of `u`, interior nodes only.
///
/// This is the negative gradient of [`discrete_dirichlet_energy`] with
/// respect to the nodal quadrature weights and the target metric, which is
/// a centered second-order discretization of
/// `Delta u^l + h^{ij} Gamma^l_mn(u) d_i u^m d_j u^n`. Being an exact
/// gradient, it makes the semi-discrete dissipation identity hold exactly.
pub fn tension_field(u: &MapField) -> TangentField {
    let mut out = TangentField::zeros(u.grid);
    let c = TensionCoefficients::new(&u.grid);
    let mut q = vec![0.0; u.grid.len()];
    tension_into(&u.grid, &c, &u.data, &mut q, &mut out.data);
    out
}

/// Tension from the pointwise formula with the compact Laplacian stencil.
/// Agrees with [`tension_field`] to second order; used as a cross-check.
pub fn tension_field_pointwise(u: &MapField) -> TangentField {
    let g = u.grid;
    let w = row_weights(&g);
    let mut out = TangentField::zeros(g);
    let n = g.len();
    let lap1 = laplace_beltrami(&ScalarField { grid: g, values: u.u1().to_vec() });
    let lap2 = laplace_beltrami(&ScalarField { grid: g, values: u.u2().to_vec() });
    let a1 = partial(&g, u.u1(), Dir::X1);
    let a2 = partial(&g, u.u1(), Dir::X2);
    let b1 = partial(&g, u.u2(), Dir::X1);
    let b2 = partial(&g, u.u2(), Dir::X2);
    for j in 1..g.n2 - 1 {
        for i in 1..g.n1 - 1 {
            let k = g.idx(i, j);
            let wj = w[j];
            out.data[k] = lap1.values[k] - 2.0 * (wj * a1[k] * b1[k] + a2[k] * b2[k]);
            out.data[n + k] = lap2.values[k]
                + (-2.0 * u.u2()[k]).exp() * (wj * a1[k] * a1[k] + a2[k] * a2[k]);
        }
    }
    out
}

/// Per-row edge coefficients of the discrete energy divided by the node weight.
#[derive(Clone, Debug)]
pub(crate) struct TensionCoefficients {
    /// `e^{2 x2} / h1^2` for the two horizontal edges.
    pub(crate) horizontal: Vec<f64>,
    /// `e^{-h2/2} / h2^2` (north edge) and `e^{h2/2} / h2^2` (south edge).
    pub(crate) north: f64,
    pub(crate) south: f64,
}

impl TensionCoefficients {
    pub(crate) fn new(grid: &Grid) -> Self {
        let (h1, h2) = (grid.h1(), grid.h2());
        Self {
            horizontal: (0..grid.n2).map(|j| (2.0 * grid.x2(j)).exp() / (h1 * h1)).collect(),
            north: (-0.5 * h2).exp() / (h2 * h2),
            south: (0.5 * h2).exp() / (h2 * h2),
        }
    }
}

/// Divergence-form Laplace-Beltrami operator on interior nodes, zero on the
/// ring: the linear part of [`tension_field`]. It is symmetric with respect
/// to the nodal quadrature weights.
pub fn laplace_beltrami_conservative(f: &ScalarField) -> ScalarField {
    let mut out = ScalarField::zeros(f.grid);
    conservative_laplace_into(&f.grid, &TensionCoefficients::new(&f.grid), &f.values, &mut out.values);
    out
}

pub(crate) fn conservative_laplace_into(grid: &Grid, c: &TensionCoefficients, f: &[f64], out: &mut [f64]) {
    let (n1, n2) = (grid.n1, grid.n2);
    out.iter_mut().for_each(|v| *v = 0.0);
    for j in 1..n2 - 1 {
        let ce = c.horizontal[j];
        for k in j * n1 + 1..(j + 1) * n1 - 1 {
            let fc = f[k];
            out[k] = ce * (f[k + 1] + f[k - 1] - 2.0 * fc)
                + c.north * (f[k + n1] - fc)
                + c.south * (f[k - n1] - fc);
        }
    }
}

/// Tension of the flat buffer `u = [u1 | u2]` into `out = [t1 | t2]`;
/// `q` is scratch of length `grid.len()`.
pub(crate) fn tension_into(
    grid: &Grid,
    c: &TensionCoefficients,
    u: &[f64],
    q: &mut [f64],
    out: &mut [f64],
) {
    let (n1, n2) = (grid.n1, grid.n2);
    let n = grid.len();
    let (a, b) = u.split_at(n);
    for (qk, &bk) in q.iter_mut().zip(b) {
        *qk = (-bk).exp();
    }
    let (o1, o2) = out.split_at_mut(n);
    let (cn, cs) = (c.north, c.south);
    for j in 0..n2 {
        let row = j * n1;
        if j == 0 || j == n2 - 1 {
            o1[row..row + n1].iter_mut().for_each(|v| *v = 0.0);
            o2[row..row + n1].iter_mut().for_each(|v| *v = 0.0);
            continue;
        }
        let ce = c.horizontal[j];
        for k in [row, row + n1 - 1] {
            o1[k] = 0.0;
            o2[k] = 0.0;
        }
        for k in row + 1..row + n1 - 1 {
            let (ac, bc, qc) = (a[k], b[k], q[k]);
            let (ke, kw, kn, ks) = (k + 1, k - 1, k + n1, k - n1);
            let (de1, dw1, dn1, ds1) = (a[ke] - ac, a[kw] - ac, a[kn] - ac, a[ks] - ac);
            let (de2, dw2, dn2, ds2) = (b[ke] - bc, b[kw] - bc, b[kn] - bc, b[ks] - bc);
            let (qe, qw, qn, qs) = (q[ke], q[kw], q[kn], q[ks]);
            let s1 = ce * (qe * de1 + qw * dw1) + cn * qn * dn1 + cs * qs * ds1;
            let s2 = ce * (qe * de1 * de1 + qw * dw1 * dw1) + cn * qn * dn1 * dn1 + cs * qs * ds1 * ds1;
            o1[k] = s1 / qc;
            o2[k] = ce * (de2 + dw2) + cn * dn2 + cs * ds2 + 0.5 * qc * s2;
        }
    }
}

/// Edge-based Dirichlet energy `(1/2) int |du|^2 dvol`.
///
/// Each grid edge carries `|u(b) - u(a)|^2_g / h^2`, the target metric taken
/// at the mean of the endpoint `u2` values, weighted by the volume element
/// and the domain metric at the edge midpoint (trapezoid halves on the outer
/// edges).
pub fn discrete_dirichlet_energy(u: &MapField) -> f64 {
    let g = u.grid;
    let (n1, n2) = (g.n1, g.n2);
    let (h1, h2) = (g.h1(), g.h2());
    let (a, b) = (u.u1(), u.u2());
    let edge = |k: usize, m: usize| {
        let d1 = a[m] - a[k];
        let d2 = b[m] - b[k];
        (-(b[k] + b[m])).exp() * d1 * d1 + d2 * d2
    };
    let mut e = 0.0;
    for j in 0..n2 {
        let cj = if j == 0 || j == n2 - 1 { 0.5 } else { 1.0 };
        let w = cj * g.x2(j).exp() * h2 / h1;
        let mut s = 0.0;
        for i in 0..n1 - 1 {
            let k = g.idx(i, j);
            s += edge(k, k + 1);
        }
        e += w * s;
    }
    for j in 0..n2 - 1 {
        let w = (-(g.x2(j) + 0.5 * h2)).exp() * h1 / h2;
        let mut s = 0.0;
        for i in 0..n1 {
            let ci = if i == 0 || i == n1 - 1 { 0.5 } else { 1.0 };
            let k = g.idx(i, j);
            s += ci * edge(k, k + n1);
        }
        e += w * s;
    }
    0.5 * e
}

/// `e(u) = |du|^2 / 2` with both metrics.
pub fn energy_density(u: &MapField) -> ScalarField {
    let g = u.grid;
    let w = row_weights(&g);
    let du1 = [partial(&g, u.u1(), Dir::X1), partial(&g, u.u1(), Dir::X2)];
    let du2 = [partial(&g, u.u2(), Dir::X1), partial(&g, u.u2(), Dir::X2)];
    let mut out = ScalarField::zeros(g);
    for k in 0..g.len() {
        let (_, j) = g.coords(k);
        let t = (-2.0 * u.u2()[k]).exp();
        let e1 = t * du1[0][k] * du1[0][k] + du2[0][k] * du2[0][k];
        let e2 = t * du1[1][k] * du1[1][k] + du2[1][k] * du2[1][k];
        out.values[k] = 0.5 * (w[j] * e1 + e2);
    }
    out
}

/// Coordinate components of `nabla_d X` for the connection pulled back by `u`.
pub fn pullback_covariant_derivative(
    x: &TangentField,
    u: &MapField,
    d: Dir,
) -> Result<TangentField> {
    check_same_grid(&x.grid, &u.grid)?;
    let g = u.grid;
    let du1 = partial(&g, u.u1(), d);
    let du2 = partial(&g, u.u2(), d);
    let mut out = TangentField::zeros(g);
    let n = g.len();
    let dx1 = partial(&g, x.x1(), d);
    let dx2 = partial(&g, x.x2(), d);
    for k in 0..n {
        let [v1, v2] = x.at(k);
        let c = covariant_correction(u.u2()[k], [du1[k], du2[k]], [v1, v2]);
        out.data[k] = dx1[k] + c[0];
        out.data[n + k] = dx2[k] + c[1];
    }
    Ok(out)
}

/// `Gamma^a_bc(u) du^b X^c` for the target metric.
#[inline]
pub(crate) fn covariant_correction(u2: f64, du: [f64; 2], x: [f64; 2]) -> [f64; 2] {
    [
        -(du[0] * x[1] + du[1] * x[0]),
        (-2.0 * u2).exp() * du[0] * x[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::norms::{lp_norm_tangent, Norm};
    use crate::geometry::{apply_j, christoffel_at, metric_at, ChartPoint};

    fn grid(n: usize) -> Grid {
        Grid::new((-1.5, 1.5), (-1.0, 1.0), n, n).unwrap()
    }

    #[test]
    fn derivative_of_constant_and_affine() {
        let g = grid(11);
        let c = ScalarField::from_fn(g, |_, _| 3.0);
        assert!(partial(&g, &c.values, Dir::X1).iter().all(|v| *v == 0.0));
        let f = ScalarField::from_fn(g, |x1, x2| 2.0 * x1 - 0.5 * x2 + 1.0);
        let d1 = partial(&g, &f.values, Dir::X1);
        let d2 = partial(&g, &f.values, Dir::X2);
        assert!(d1.iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(d2.iter().all(|v| (v + 0.5).abs() < 1e-12));
        let x = ScalarField::from_fn(g, |x1, _| x1);
        let dx2 = partial(&g, &x.values, Dir::X2);
        assert!(dx2.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn derivative_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |x1, _| x1.sin());
            let d = partial(&g, &f.values, Dir::X1);
            (0..g.len())
                .map(|k| (d[k] - g.x1(g.coords(k).0).cos()).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(17), err(33));
        assert!(a / b >= 3.5, "ratio {}", a / b);
    }

    #[test]
    fn second_partial_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |_, x2| (1.3 * x2).sin());
            let d = second_partial(&g, &f.values, Dir::X2);
            (0..g.len())
                .map(|k| (d[k] + 1.69 * (1.3 * g.x2(g.coords(k).1)).sin()).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(17), err(33));
        assert!(a / b >= 3.5, "ratio {}", a / b);
    }

    fn interior_max(g: &Grid, v: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut m: f64 = 0.0;
        for j in 1..g.n2 - 1 {
            for i in 1..g.n1 - 1 {
                m = m.max((v[g.idx(i, j)] - f(g.x1(i), g.x2(j))).abs());
            }
        }
        m
    }

    #[test]
    fn laplacian_examples() {
        let g = grid(13);
        let c = laplace_beltrami(&ScalarField::from_fn(g, |_, _| 2.0));
        assert!(c.values.iter().all(|v| v.abs() < 1e-12));
        let y = laplace_beltrami(&ScalarField::from_fn(g, |_, x2| x2));
        assert!(interior_max(&g, &y.values, |_, _| -1.0) < 1e-12);
        let x = laplace_beltrami(&ScalarField::from_fn(g, |x1, _| x1));
        assert!(interior_max(&g, &x.values, |_, _| 0.0) < 1e-12);
    }

    /// Divergence form `(1/sqrt h) d_i (sqrt h h^{ij} d_j f)` with fluxes on
    /// cell faces, built from `metric_at` only.
    fn divergence_form(g: &Grid, f: &[f64]) -> Vec<f64> {
        let (h1, h2) = (g.h1(), g.h2());
        let mut out = vec![0.0; g.len()];
        let face = |x1: f64, x2: f64| {
            let m = metric_at(ChartPoint::new(x1, x2));
            (m.sqrt_det * m.inv11, m.sqrt_det * m.inv22)
        };
        for j in 1..g.n2 - 1 {
            for i in 1..g.n1 - 1 {
                let (x1, x2) = (g.x1(i), g.x2(j));
                let k = g.idx(i, j);
                let fe = face(x1 + h1 / 2.0, x2).0 * (f[k + 1] - f[k]) / h1;
                let fw = face(x1 - h1 / 2.0, x2).0 * (f[k] - f[k - 1]) / h1;
                let fn_ = face(x1, x2 + h2 / 2.0).1 * (f[k + g.n1] - f[k]) / h2;
                let fs = face(x1, x2 - h2 / 2.0).1 * (f[k] - f[k - g.n1]) / h2;
                let sd = metric_at(ChartPoint::new(x1, x2)).sqrt_det;
                out[k] = ((fe - fw) / h1 + (fn_ - fs) / h2) / sd;
            }
        }
        out
    }

    #[test]
    fn laplacian_matches_divergence_form() {
        let test = |x1: f64, x2: f64| (0.7 * x1).sin() * (0.9 * x2).cos() + x1 * x2 * x2;
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, test);
            let a = laplace_beltrami(&f);
            let b = divergence_form(&g, &f.values);
            (0..g.len()).map(|k| (a.values[k] - b[k]).abs()).fold(0.0, f64::max)
        };
        let (a, b) = (err(17), err(33));
        assert!(a < 5e-2, "{a}");
        assert!(a / b > 3.5, "ratio {}", a / b);
    }

    #[test]
    fn conservative_laplacian_is_consistent_and_symmetric() {
        let test = |x1: f64, x2: f64| (0.7 * x1).sin() * (0.9 * x2).cos() + x1 * x2 * x2;
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, test);
            let a = laplace_beltrami(&f);
            let b = laplace_beltrami_conservative(&f);
            (0..g.len()).map(|k| (a.values[k] - b.values[k]).abs()).fold(0.0, f64::max)
        };
        assert!(err(17) / err(33) > 3.5);
        let g = grid(13);
        let bump = |c: f64| ScalarField::from_fn(g, move |x1, x2| (-(x1 - c).powi(2) - x2 * x2).exp() * x1.cos());
        let (f, h) = (bump(0.0), bump(0.3));
        let w = super::super::norms::quadrature_weights(&g);
        let zero_ring = |mut s: ScalarField| {
            for k in g.boundary_indices().collect::<Vec<_>>() {
                s.values[k] = 0.0;
            }
            s
        };
        let (f, h) = (zero_ring(f), zero_ring(h));
        let lf = laplace_beltrami_conservative(&f);
        let lh = laplace_beltrami_conservative(&h);
        let a: f64 = (0..g.len()).map(|k| w[k] * lf.values[k] * h.values[k]).sum();
        let b: f64 = (0..g.len()).map(|k| w[k] * f.values[k] * lh.values[k]).sum();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn tension_of_constant_is_zero() {
        let g = grid(12);
        let u = MapField::constant(g, ChartPoint::new(0.3, -0.2));
        assert!(tension_field(&u).data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn identity_tension_vanishes_at_second_order() {
        let err = |n: usize| {
            let u = MapField::identity(grid(n));
            lp_norm_tangent(&tension_field(&u), &u, Norm::Inf).unwrap()
        };
        let (a, b) = (err(17), err(33));
        assert!(a < 1e-2, "{a}");
        assert!(a / b > 3.5, "ratio {}", a / b);
        // The pointwise form is exact on the identity.
        let u = MapField::identity(grid(17));
        assert!(lp_norm_tangent(&tension_field_pointwise(&u), &u, Norm::Inf).unwrap() < 1e-10);
    }

    /// Tension from the general formula with `christoffel_at`, as an oracle.
    fn tension_oracle(u: &MapField) -> TangentField {
        let g = u.grid;
        let lap1 = laplace_beltrami(&ScalarField { grid: g, values: u.u1().to_vec() });
        let lap2 = laplace_beltrami(&ScalarField { grid: g, values: u.u2().to_vec() });
        let du = [
            [partial(&g, u.u1(), Dir::X1), partial(&g, u.u1(), Dir::X2)],
            [partial(&g, u.u2(), Dir::X1), partial(&g, u.u2(), Dir::X2)],
        ];
        let mut out = TangentField::zeros(g);
        for j in 1..g.n2 - 1 {
            for i in 1..g.n1 - 1 {
                let k = g.idx(i, j);
                let hinv = metric_at(g.point(i, j));
                let hd = [hinv.inv11, hinv.inv22];
                let gam = christoffel_at(u.point(k)).gamma;
                let mut t = [lap1.values[k], lap2.values[k]];
                for (l, tl) in t.iter_mut().enumerate() {
                    for (d, hdd) in hd.iter().enumerate() {
                        for m in 0..2 {
                            for nn in 0..2 {
                                *tl += hdd * gam[l][m][nn] * du[m][d][k] * du[nn][d][k];
                            }
                        }
                    }
                }
                out.set(k, t);
            }
        }
        out
    }

    #[test]
    fn tension_matches_general_formula() {
        let fu = |p: ChartPoint| {
            ChartPoint::new(p.x1 + 0.2 * (p.x2).sin(), 0.5 * p.x2 + 0.1 * p.x1 * p.x1)
        };
        let g = grid(15);
        let u = MapField::from_fn(g, fu);
        let a = tension_field_pointwise(&u);
        let b = tension_oracle(&u);
        for k in 0..2 * g.len() {
            assert!((a.data[k] - b.data[k]).abs() < 1e-10 * (1.0 + b.data[k].abs()));
        }
        let gap = |n: usize| {
            let u = MapField::from_fn(grid(n), fu);
            let a = tension_field(&u);
            let b = tension_field_pointwise(&u);
            a.data.iter().zip(&b.data).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (gap(17), gap(33));
        assert!(e1 / e2 > 3.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn tension_is_energy_gradient() {
        let g = grid(13);
        let u = MapField::from_fn(g, |p| {
            ChartPoint::new(0.6 * p.x1 + 0.3 * (p.x1 * p.x2).sin(), 0.4 * p.x2 - 0.2 * p.x1.cos())
        });
        let t = tension_field(&u);
        let w = crate::fields::norms::quadrature_weights(&g);
        // Interior direction field.
        let mut dir = TangentField::zeros(g);
        for k in 0..g.len() {
            let (i, j) = g.coords(k);
            if !g.is_boundary(i, j) {
                let p = g.point(i, j);
                dir.set(k, [(2.0 * p.x1).cos(), (p.x2 + p.x1).sin()]);
            }
        }
        let shifted = |eps: f64| {
            let mut v = u.clone();
            for (x, d) in v.data.iter_mut().zip(&dir.data) {
                *x += eps * d;
            }
            discrete_dirichlet_energy(&v)
        };
        let eps = 1e-5;
        let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        let exact: f64 = -(0..g.len())
            .map(|k| w[k] * metric_at(u.point(k)).inner(t.at(k), dir.at(k)))
            .sum::<f64>();
        assert!((fd - exact).abs() < 1e-7 * (1.0 + exact.abs()), "{fd} vs {exact}");
    }

    #[test]
    fn discrete_energy_tracks_density_integral() {
        let gap = |n: usize| {
            let u = MapField::from_fn(grid(n), |p| ChartPoint::new(0.5 * p.x1 + 0.1 * p.x2 * p.x2, 0.7 * p.x2));
            let nodal = crate::fields::norms::integrate(&u.grid, &energy_density(&u).values);
            (discrete_dirichlet_energy(&u) - nodal).abs()
        };
        assert!(gap(17) / gap(33) > 3.0);
    }

    #[test]
    fn identity_energy_density_is_one() {
        let u = MapField::identity(grid(12));
        let e = energy_density(&u);
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let c = energy_density(&MapField::constant(grid(12), ChartPoint::new(1.0, 1.0)));
        assert!(c.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn energy_density_matches_trace_of_pullback() {
        let g = grid(14);
        let u = MapField::from_fn(g, |p| {
            ChartPoint::new((p.x1).sin() + p.x2, p.x1 * p.x2 - 0.3)
        });
        let e = energy_density(&u);
        for k in 0..g.len() {
            let (i, j) = g.coords(k);
            let h = metric_at(g.point(i, j));
            let gu = metric_at(u.point(k));
            let di = |d: Dir| {
                [partial(&g, u.u1(), d)[k], partial(&g, u.u2(), d)[k]]
            };
            let (a, b) = (di(Dir::X1), di(Dir::X2));
            let tr = h.inv11 * gu.inner(a, a) + h.inv22 * gu.inner(b, b);
            assert!((e.values[k] - 0.5 * tr).abs() < 1e-12 * (1.0 + tr));
        }
    }

    #[test]
    fn covariant_derivative_of_theta2_along_identity() {
        // For u = identity, Theta_2 = d/dy2 is constant in coordinates, so
        // nabla_1 Theta_2 = Gamma^a_{1 2} = (-1, 0) and nabla_2 Theta_2 = 0.
        let g = grid(12);
        let u = MapField::identity(g);
        let mut x = TangentField::zeros(g);
        x.x2_mut().iter_mut().for_each(|v| *v = 1.0);
        let d1 = pullback_covariant_derivative(&x, &u, Dir::X1).unwrap();
        let d2 = pullback_covariant_derivative(&x, &u, Dir::X2).unwrap();
        for k in 0..g.len() {
            assert!((d1.at(k)[0] + 1.0).abs() < 1e-12 && d1.at(k)[1].abs() < 1e-12);
            assert!(d2.at(k)[0].abs() < 1e-12 && d2.at(k)[1].abs() < 1e-12);
        }
        // J commutes with nabla: nabla Theta_2 = J nabla Theta_1.
        let mut t1 = TangentField::zeros(g);
        for k in 0..g.len() {
            t1.set(k, [u.u2()[k].exp(), 0.0]);
        }
        let e1 = pullback_covariant_derivative(&t1, &u, Dir::X1).unwrap();
        for k in 0..g.len() {
            let j = apply_j(u.point(k), e1.at(k));
            assert!((j[0] - d1.at(k)[0]).abs() < 1e-9 && (j[1] - d1.at(k)[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn metric_compatibility_second_order() {
        let fu = |p: ChartPoint| ChartPoint::new(0.8 * p.x1 + 0.2 * p.x2.sin(), 0.6 * p.x2 + 0.2 * (p.x1).cos());
        let fx = |p: ChartPoint| [(p.x1 + p.x2).cos(), 0.3 * p.x1 * p.x2];
        let fy = |p: ChartPoint| [0.5 + p.x2 * p.x2, (p.x1).sin()];
        let err = |n: usize| {
            let g = grid(n);
            let u = MapField::from_fn(g, fu);
            let mk = |f: &dyn Fn(ChartPoint) -> [f64; 2]| {
                let mut t = TangentField::zeros(g);
                for k in 0..g.len() {
                    let (i, j) = g.coords(k);
                    t.set(k, f(g.point(i, j)));
                }
                t
            };
            let (x, y) = (mk(&fx), mk(&fy));
            let inner: Vec<f64> = (0..g.len())
                .map(|k| metric_at(u.point(k)).inner(x.at(k), y.at(k)))
                .collect();
            let mut e: f64 = 0.0;
            for d in [Dir::X1, Dir::X2] {
                let di = partial(&g, &inner, d);
                let nx = pullback_covariant_derivative(&x, &u, d).unwrap();
                let ny = pullback_covariant_derivative(&y, &u, d).unwrap();
                for k in 0..g.len() {
                    let m = metric_at(u.point(k));
                    let r = di[k] - m.inner(nx.at(k), y.at(k)) - m.inner(x.at(k), ny.at(k));
                    e = e.max(r.abs());
                }
            }
            e
        };
        let (a, b) = (err(17), err(33));
        assert!(a / b >= 3.5, "ratio {}", a / b);
    }
}
