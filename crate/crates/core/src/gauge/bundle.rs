//! Differential fields and connection coefficients in a frame.
//!
//! Connection coefficients are carried as link phases on grid edges,
//! `a(x -> y) = wrap(angle(y) - angle(x)) + e^{-mean u2} (u1(y) - u1(x))`,
//! where `angle` is the frame angle in the global frame and the second
//! term integrates the global frame's own connection form `e^{-u2} du1`
//! along the edge. Nodal coefficients are averaged links; covariant
//! differences use the links directly, so a pointwise change of frame
//! multiplies every covariant difference by the same phase.

use super::frame::Frame;
use crate::error::Result;
use crate::fields::io::write_dump;
use crate::fields::{check_same_grid, partial, tension_field, Dir, Grid, MapField, TangentField};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Representative of `x` modulo `2 pi` in `[-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// `<X, e1> + i <X, J e1>` at each node.
pub fn frame_components(x: &TangentField, u: &MapField, frame: &Frame) -> Result<Vec<Complex64>> {
    check_same_grid(&x.grid, &u.grid)?;
    check_same_grid(&frame.e1.grid, &u.grid)?;
    Ok((0..u.grid.len())
        .map(|k| {
            let q2 = (-2.0 * u.u2()[k]).exp();
            let [a, b] = x.at(k);
            let [e, f] = frame.e1.at(k);
            // J e1 = (-e^{u2} f, e^{-u2} e)
            let je = [-u.u2()[k].exp() * f, (-u.u2()[k]).exp() * e];
            Complex64::new(q2 * a * e + b * f, q2 * a * je[0] + b * je[1])
        })
        .collect())
}

/// `Re phi * e1 + Im phi * J e1`, the inverse of [`frame_components`].
pub fn from_frame_components(phi: &[Complex64], u: &MapField, frame: &Frame) -> TangentField {
    let mut out = TangentField::zeros(u.grid);
    for (k, p) in phi.iter().enumerate() {
        let [e, f] = frame.e1.at(k);
        let je = [-u.u2()[k].exp() * f, (-u.u2()[k]).exp() * e];
        out.set(k, [p.re * e + p.im * je[0], p.re * f + p.im * je[1]]);
    }
    out
}

/// Coordinate partials of `u` as tangent fields.
pub fn map_partials(u: &MapField) -> [TangentField; 2] {
    [Dir::X1, Dir::X2].map(|d| TangentField {
        grid: u.grid,
        data: [partial(&u.grid, u.u1(), d), partial(&u.grid, u.u2(), d)].concat(),
    })
}

/// `phi_1, phi_2` of `u` in `frame`.
pub fn differential_fields(u: &MapField, frame: &Frame) -> Result<[Vec<Complex64>; 2]> {
    let [d1, d2] = map_partials(u);
    Ok([frame_components(&d1, u, frame)?, frame_components(&d2, u, frame)?])
}

/// Real pairing `a^1 b^2 - a^2 b^1`.
pub fn wedge(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Frame-free form of the wedge of two sections: `<J X, Y>`.
pub fn wedge_of_tangents(u: &MapField, x: &TangentField, y: &TangentField) -> Vec<f64> {
    (0..u.grid.len())
        .map(|k| {
            let [a, b] = x.at(k);
            let [c, d] = y.at(k);
            (-u.u2()[k]).exp() * (a * d - b * c)
        })
        .collect()
}

fn link(ta: f64, tb: f64, ua: [f64; 2], ub: [f64; 2]) -> f64 {
    wrap_angle(tb - ta) + (-0.5 * (ua[1] + ub[1])).exp() * (ub[0] - ua[0])
}

/// Link phases of a frame along the two grid directions.
#[derive(Clone, Debug, PartialEq)]
pub struct Links {
    pub grid: Grid,
    /// Edge `(i, j) -> (i + 1, j)` stored at node `(i, j)`; zero in the last column.
    pub along_x1: Vec<f64>,
    /// Edge `(i, j) -> (i, j + 1)` stored at node `(i, j)`; zero in the last row.
    pub along_x2: Vec<f64>,
}

impl Links {
    pub fn new(u: &MapField, frame: &Frame) -> Result<Self> {
        check_same_grid(&u.grid, &frame.e1.grid)?;
        let g = u.grid;
        let theta = frame.angles(u);
        let mut along_x1 = vec![0.0; g.len()];
        let mut along_x2 = vec![0.0; g.len()];
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let k = g.idx(i, j);
                if i + 1 < g.n1 {
                    let m = g.idx(i + 1, j);
                    along_x1[k] = link(theta[k], theta[m], u.at(k), u.at(m));
                }
                if j + 1 < g.n2 {
                    let m = g.idx(i, j + 1);
                    along_x2[k] = link(theta[k], theta[m], u.at(k), u.at(m));
                }
            }
        }
        Ok(Self { grid: g, along_x1, along_x2 })
    }

    pub fn along(&self, d: Dir) -> &[f64] {
        match d {
            Dir::X1 => &self.along_x1,
            Dir::X2 => &self.along_x2,
        }
    }

    /// Nodal coefficient: mean of adjacent links over the spacing, with a
    /// second-order one-sided combination on the edges.
    pub fn nodal(&self, d: Dir) -> Vec<f64> {
        let g = self.grid;
        let h = g.h(d);
        let a = self.along(d);
        let (n, stride) = match d {
            Dir::X1 => (g.n1, 1),
            Dir::X2 => (g.n2, g.n1),
        };
        let mut out = vec![0.0; g.len()];
        for k in 0..g.len() {
            let (i, j) = g.coords(k);
            let p = if d == Dir::X1 { i } else { j };
            out[k] = if p == 0 {
                (3.0 * a[k] - a[k + stride]) / (2.0 * h)
            } else if p == n - 1 {
                (3.0 * a[k - stride] - a[k - 2 * stride]) / (2.0 * h)
            } else {
                (a[k - stride] + a[k]) / (2.0 * h)
            };
        }
        out
    }

    /// Centered covariant difference `D_d psi` at interior node `k`.
    pub fn covariant_diff(&self, psi: &[Complex64], d: Dir, k: usize) -> Complex64 {
        let (s, a) = self.step(d);
        let h = self.grid.h(d);
        (Complex64::from_polar(1.0, a[k]) * psi[k + s]
            - Complex64::from_polar(1.0, -a[k - s]) * psi[k - s])
            / (2.0 * h)
    }

    /// Compact covariant second difference `D_d D_d psi` at interior node `k`.
    pub fn covariant_second_diff(&self, psi: &[Complex64], d: Dir, k: usize) -> Complex64 {
        let (s, a) = self.step(d);
        let h = self.grid.h(d);
        (Complex64::from_polar(1.0, a[k]) * psi[k + s] - 2.0 * psi[k]
            + Complex64::from_polar(1.0, -a[k - s]) * psi[k - s])
            / (h * h)
    }

    fn step(&self, d: Dir) -> (usize, &[f64]) {
        match d {
            Dir::X1 => (1, &self.along_x1),
            Dir::X2 => (self.grid.n1, &self.along_x2),
        }
    }

    /// Curvature of the links on the cell with lower-left node `k`.
    pub fn plaquette(&self, k: usize) -> f64 {
        let g = self.grid;
        let sum = self.along_x1[k] + self.along_x2[k + 1]
            - self.along_x1[k + g.n1]
            - self.along_x2[k];
        wrap_angle(sum) / (g.h1() * g.h2())
    }
}

/// `A_i = <nabla_i e1, J e1>` along one grid direction.
pub fn connection_from_frame(u: &MapField, frame: &Frame, d: Dir) -> Result<Vec<f64>> {
    Ok(Links::new(u, frame)?.nodal(d))
}

/// Connection coefficient along a parameter (`s` or `t`) from two frames
/// separated by `step`; second-order accurate at the midpoint.
pub fn connection_between(
    ua: &MapField,
    fa: &Frame,
    ub: &MapField,
    fb: &Frame,
    step: f64,
) -> Result<Vec<f64>> {
    check_same_grid(&ua.grid, &ub.grid)?;
    Ok(link_between(ua, fa, ub, fb)
        .into_iter()
        .map(|a| a / step)
        .collect())
}

pub(crate) fn link_between(ua: &MapField, fa: &Frame, ub: &MapField, fb: &Frame) -> Vec<f64> {
    let ta = fa.angles(ua);
    let tb = fb.angles(ub);
    (0..ua.grid.len())
        .map(|k| link(ta[k], tb[k], ua.at(k), ub.at(k)))
        .collect()
}

/// All fields of the gauge on one slice.
#[derive(Clone, Debug)]
pub struct GaugeBundle {
    pub grid: Grid,
    pub phi1: Vec<Complex64>,
    pub phi2: Vec<Complex64>,
    pub phit: Vec<Complex64>,
    pub phis: Vec<Complex64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub at: Vec<f64>,
    pub links: Links,
}

impl GaugeBundle {
    /// Bundle of `u` in `frame`; `phi_s` is the frame form of the discrete
    /// tension, `phi_t` that of `velocity`, and `at` is supplied by the
    /// caller because it needs neighbouring slices in `t`.
    pub fn assemble(u: &MapField, frame: &Frame, velocity: &TangentField, at: Vec<f64>) -> Result<Self> {
        let links = Links::new(u, frame)?;
        let [phi1, phi2] = differential_fields(u, frame)?;
        let phis = frame_components(&tension_field(u), u, frame)?;
        let phit = frame_components(velocity, u, frame)?;
        Ok(Self {
            grid: u.grid,
            phi1,
            phi2,
            phit,
            phis,
            a1: links.nodal(Dir::X1),
            a2: links.nodal(Dir::X2),
            at,
            links,
        })
    }

    /// Writes `phi_1, phi_2, phi_t, phi_s` (real and imaginary parts) and
    /// `A_1, A_2, A_t` in the grid-dump format.
    pub fn write_snapshot<W: std::io::Write>(&self, w: W) -> Result<()> {
        let split = |v: &[Complex64]| -> (Vec<f64>, Vec<f64>) { v.iter().map(|c| (c.re, c.im)).unzip() };
        let (p1r, p1i) = split(&self.phi1);
        let (p2r, p2i) = split(&self.phi2);
        let (ptr, pti) = split(&self.phit);
        let (psr, psi) = split(&self.phis);
        write_dump(
            w,
            &self.grid,
            &["phi1_re", "phi1_im", "phi2_re", "phi2_im", "phit_re", "phit_im", "phis_re", "phis_im", "A1", "A2", "At"],
            &[&p1r, &p1i, &p2r, &p2i, &ptr, &pti, &psr, &psi, &self.a1, &self.a2, &self.at],
        )
    }

    pub fn phi(&self, d: Dir) -> &[Complex64] {
        match d {
            Dir::X1 => &self.phi1,
            Dir::X2 => &self.phi2,
        }
    }

    /// Interior node indices.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        let g = self.grid;
        (1..g.n2 - 1).flat_map(move |j| (1..g.n1 - 1).map(move |i| g.idx(i, j)))
    }

    /// `h^{ij} D_i phi_j - h^{ij} Gamma^k_ij phi_k` at interior node `k`.
    pub fn divergence(&self, k: usize) -> Complex64 {
        let x2 = self.grid.x2(self.grid.coords(k).1);
        (2.0 * x2).exp() * self.links.covariant_diff(&self.phi1, Dir::X1, k)
            + self.links.covariant_diff(&self.phi2, Dir::X2, k)
            - self.phi2[k]
    }

    /// `h^{ij} D_i D_j psi - h^{ij} Gamma^k_ij D_k psi` at interior node `k`.
    pub fn covariant_laplacian(&self, psi: &[Complex64], k: usize) -> Complex64 {
        let x2 = self.grid.x2(self.grid.coords(k).1);
        (2.0 * x2).exp() * self.links.covariant_second_diff(psi, Dir::X1, k)
            + self.links.covariant_second_diff(psi, Dir::X2, k)
            - self.links.covariant_diff(psi, Dir::X2, k)
    }

    /// `i h^{ij} (a wedge phi_i) phi_j` at node `k`.
    pub fn curvature_term(&self, a: Complex64, k: usize) -> Complex64 {
        let x2 = self.grid.x2(self.grid.coords(k).1);
        Complex64::i()
            * ((2.0 * x2).exp() * wedge(a, self.phi1[k]) * self.phi1[k]
                + wedge(a, self.phi2[k]) * self.phi2[k])
    }

    /// Pointwise change of frame by `chi`: `phi -> e^{-i chi} phi`, links
    /// shift by differences of `chi`. `A_t` is shifted by `chi_t`.
    pub fn gauge_transformed(&self, u: &MapField, frame: &Frame, chi: &[f64], chi_t: &[f64]) -> Result<Self> {
        let rotated = frame.rotated(u, chi);
        let links = Links::new(u, &rotated)?;
        let ph = |v: &[Complex64]| -> Vec<Complex64> {
            v.iter()
                .zip(chi)
                .map(|(p, c)| Complex64::from_polar(1.0, -c) * p)
                .collect()
        };
        Ok(Self {
            grid: self.grid,
            phi1: ph(&self.phi1),
            phi2: ph(&self.phi2),
            phit: ph(&self.phit),
            phis: ph(&self.phis),
            a1: links.nodal(Dir::X1),
            a2: links.nodal(Dir::X2),
            at: self.at.iter().zip(chi_t).map(|(a, c)| a + c).collect(),
            links,
        })
    }
}
