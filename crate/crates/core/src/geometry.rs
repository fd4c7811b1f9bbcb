//! Pointwise geometry of the hyperbolic plane.
//!
//! Points are addressed in the global Iwasawa chart `(x1, x2)`, which embeds
//! into the upper sheet of the hyperboloid `[x, x] = 1, x0 > 0` with
//! `[x, y] = x0 y0 - x1 y1 - x2 y2`. In this chart the metric is
//! `e^{-2 x2} dx1^2 + dx2^2`, and `w = x1 + i e^{x2}` is an orientation
//! preserving isometry onto the upper half plane. The Poincare disk is reached
//! from there through the Cayley transform `z = (w - i) / (w + i)`, so the
//! chart origin corresponds to the disk origin and to the hyperboloid apex.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the Iwasawa chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub x1: f64,
    pub x2: f64,
}

impl ChartPoint {
    pub const ORIGIN: ChartPoint = ChartPoint { x1: 0.0, x2: 0.0 };

    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

/// A vector of the ambient Minkowski space R^{2+1}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinkowskiVec {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl MinkowskiVec {
    /// The bilinear form `[a, b] = a0 b0 - a1 b1 - a2 b2`.
    pub fn form(&self, other: &MinkowskiVec) -> f64 {
        self.x0 * other.x0 - self.x1 * other.x1 - self.x2 * other.x2
    }
}

/// Metric coefficients of the chart at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricData {
    pub h11: f64,
    pub h22: f64,
    pub inv11: f64,
    pub inv22: f64,
    pub sqrt_det: f64,
}

impl MetricData {
    pub fn inner(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        self.h11 * a[0] * b[0] + self.h22 * a[1] * b[1]
    }

    pub fn norm(&self, a: [f64; 2]) -> f64 {
        self.inner(a, a).sqrt()
    }
}

/// Christoffel symbols `gamma[k][i][j]` (upper index first), indices 0-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChristoffelSymbols {
    pub gamma: [[[f64; 2]; 2]; 2],
}

/// A point of the open Poincare disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub re: f64,
    pub im: f64,
}

impl DiskPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let p = Self { re, im };
        if !(re.is_finite() && im.is_finite()) || re * re + im * im >= 1.0 {
            return Err(Error::Domain(format!(
                "disk point ({re}, {im}) is not inside the unit disk"
            )));
        }
        Ok(p)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }
}

/// The chart map onto the hyperboloid.
pub fn embed_iwasawa(p: ChartPoint) -> MinkowskiVec {
    let e = (-p.x2).exp();
    let q = e * p.x1 * p.x1 / 2.0;
    MinkowskiVec {
        x0: p.x2.cosh() + q,
        x1: p.x2.sinh() + q,
        x2: e * p.x1,
    }
}

/// Inverse of [`embed_iwasawa`] for points of the upper sheet.
pub fn chart_from_hyperboloid(v: MinkowskiVec) -> ChartPoint {
    // x0 - x1 = e^{-x2} on the image of the chart.
    let d = v.x0 - v.x1;
    ChartPoint {
        x1: v.x2 / d,
        x2: -d.ln(),
    }
}

pub fn metric_at(p: ChartPoint) -> MetricData {
    let h11 = (-2.0 * p.x2).exp();
    MetricData {
        h11,
        h22: 1.0,
        inv11: (2.0 * p.x2).exp(),
        inv22: 1.0,
        sqrt_det: (-p.x2).exp(),
    }
}

pub fn christoffel_at(p: ChartPoint) -> ChristoffelSymbols {
    let mut gamma = [[[0.0; 2]; 2]; 2];
    gamma[0][0][1] = -1.0;
    gamma[0][1][0] = -1.0;
    gamma[1][0][0] = (-2.0 * p.x2).exp();
    ChristoffelSymbols { gamma }
}

/// Geodesic distance.
///
/// Uses `sinh(d/2) = |w - w'| / (2 sqrt(Im w Im w'))` in the half-plane picture,
/// which equals `arccosh [P, Q]` but keeps full relative precision for nearby
/// points.
pub fn geodesic_distance(p: ChartPoint, q: ChartPoint) -> f64 {
    let dx = p.x1 - q.x1;
    // e^{p2} - e^{q2} without cancellation.
    let dy = q.x2.exp() * (p.x2 - q.x2).exp_m1();
    let half = (dx * dx + dy * dy).sqrt() / (2.0 * (0.5 * (p.x2 + q.x2)).exp());
    2.0 * half.asinh()
}

/// Geodesic distance evaluated through the hyperboloid embedding, with the
/// form clamped to `>= 1`.
pub fn geodesic_distance_embedded(p: ChartPoint, q: ChartPoint) -> f64 {
    embed_iwasawa(p).form(&embed_iwasawa(q)).max(1.0).acosh()
}

/// Complex structure applied to coordinate components `v` at `p`:
/// `J d/dx1 = e^{-x2} d/dx2` and `J d/dx2 = -e^{x2} d/dx1`.
pub fn apply_j(p: ChartPoint, v: [f64; 2]) -> [f64; 2] {
    apply_j_at(p.x2, v)
}

#[inline]
pub(crate) fn apply_j_at(x2: f64, v: [f64; 2]) -> [f64; 2] {
    [-x2.exp() * v[1], (-x2).exp() * v[0]]
}

/// The global orthonormal frame `Theta_1 = e^{x2} d/dx1`, `Theta_2 = d/dx2`.
pub fn frame_theta(p: ChartPoint) -> ([f64; 2], [f64; 2]) {
    ([p.x2.exp(), 0.0], [0.0, 1.0])
}

/// Disk point to chart point (Cayley transform then `w = x1 + i e^{x2}`).
pub fn disk_to_chart(z: DiskPoint) -> ChartPoint {
    let zc = z.as_complex();
    let one = Complex64::new(1.0, 0.0);
    let w = Complex64::i() * (one + zc) / (one - zc);
    let r2 = z.re * z.re + z.im * z.im;
    let den = (1.0 - z.re) * (1.0 - z.re) + z.im * z.im;
    // Im w = (1 - |z|^2) / |1 - z|^2, evaluated directly for accuracy.
    ChartPoint {
        x1: w.re,
        x2: ((1.0 - r2) / den).ln(),
    }
}

/// Chart point to disk point.
pub fn chart_to_disk(p: ChartPoint) -> DiskPoint {
    let w = Complex64::new(p.x1, p.x2.exp());
    let z = (w - Complex64::i()) / (w + Complex64::i());
    DiskPoint { re: z.re, im: z.im }
}

/// Closed-form distance in the disk model.
pub fn disk_distance(a: DiskPoint, b: DiskPoint) -> f64 {
    let za = a.as_complex();
    let zb = b.as_complex();
    let num = 2.0 * (za - zb).norm_sqr();
    let den = (1.0 - za.norm_sqr()) * (1.0 - zb.norm_sqr());
    (1.0 + num / den).acosh()
}

/// Geodesic distance from the chart origin, i.e. the disk radius function `r`.
pub fn distance_from_origin(p: ChartPoint) -> f64 {
    geodesic_distance(p, ChartPoint::ORIGIN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt() -> impl Strategy<Value = ChartPoint> {
        (-4.0..4.0f64, -3.0..3.0f64).prop_map(|(a, b)| ChartPoint::new(a, b))
    }

    #[test]
    fn embedding_examples() {
        let v = embed_iwasawa(ChartPoint::ORIGIN);
        assert_eq!((v.x0, v.x1, v.x2), (1.0, 0.0, 0.0));
        let v = embed_iwasawa(ChartPoint::new(0.0, 1.0));
        assert!((v.x0 - 1f64.cosh()).abs() < 1e-15);
        assert!((v.x1 - 1f64.sinh()).abs() < 1e-15);
        assert_eq!(v.x2, 0.0);
    }

    #[test]
    fn metric_and_christoffel_examples() {
        let m = metric_at(ChartPoint::new(3.7, 0.0));
        assert_eq!((m.h11, m.h22), (1.0, 1.0));
        let m = metric_at(ChartPoint::new(-1.0, 1.0));
        assert!((m.h11 - (-2.0f64).exp()).abs() < 1e-16);
        let g = christoffel_at(ChartPoint::new(0.3, 0.0));
        assert_eq!(g.gamma[0][0][1], -1.0);
        assert_eq!(g.gamma[1][0][0], 1.0);
        assert_eq!(g.gamma[1][1][1], 0.0);
        assert_eq!(g.gamma[0][1][1], 0.0);
        assert_eq!(g.gamma[1][1][0], 0.0);
        assert_eq!(g.gamma[0][0][0], 0.0);
    }

    /// Levi-Civita symbols rebuilt from `metric_at` by central differences.
    fn christoffel_fd(p: ChartPoint, h: f64) -> [[[f64; 2]; 2]; 2] {
        let g = |q: ChartPoint| {
            let m = metric_at(q);
            [[m.h11, 0.0], [0.0, m.h22]]
        };
        let dg = |l: usize| {
            let (mut a, mut b) = (p, p);
            if l == 0 {
                a.x1 += h;
                b.x1 -= h;
            } else {
                a.x2 += h;
                b.x2 -= h;
            }
            let (ga, gb) = (g(a), g(b));
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = (ga[i][j] - gb[i][j]) / (2.0 * h);
                }
            }
            out
        };
        let d = [dg(0), dg(1)];
        let m = metric_at(p);
        let inv = [[m.inv11, 0.0], [0.0, m.inv22]];
        let mut out = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += 0.5 * inv[k][l] * (d[i][l][j] + d[j][l][i] - d[l][i][j]);
                    }
                    out[k][i][j] = s;
                }
            }
        }
        out
    }

    #[test]
    fn christoffel_matches_levi_civita_oracle_at_second_order() {
        let p = ChartPoint::new(0.4, 0.7);
        let exact = christoffel_at(p).gamma;
        let err = |h: f64| {
            let fd = christoffel_fd(p, h);
            let mut e: f64 = 0.0;
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        e = e.max((fd[k][i][j] - exact[k][i][j]).abs());
                    }
                }
            }
            e
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e1 < 1e-3);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn distance_examples() {
        let p = ChartPoint::new(1.2, -0.4);
        assert_eq!(geodesic_distance(p, p), 0.0);
        let d = geodesic_distance(ChartPoint::ORIGIN, ChartPoint::new(0.0, 1.0));
        let oracle = embed_iwasawa(ChartPoint::new(0.0, 1.0)).x0.acosh();
        assert!((d - 1.0).abs() < 1e-14);
        assert!((d - oracle).abs() < 1e-14);
    }

    #[test]
    fn j_examples() {
        let v = apply_j(ChartPoint::new(2.0, 0.0), [1.0, 0.0]);
        assert_eq!(v, [0.0, 1.0]);
        let (t1, t2) = frame_theta(ChartPoint::new(-3.0, 0.0));
        assert_eq!(t1, [1.0, 0.0]);
        assert_eq!(t2, [0.0, 1.0]);
    }

    #[test]
    fn disk_origin_is_apex() {
        let c = disk_to_chart(DiskPoint::new(0.0, 0.0).unwrap());
        assert!(c.x1.abs() < 1e-15 && c.x2.abs() < 1e-15);
        let v = embed_iwasawa(c);
        assert!((v.x0 - 1.0).abs() < 1e-15);
        let z = chart_to_disk(ChartPoint::ORIGIN);
        assert!(z.re.abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    #[test]
    fn disk_rejects_boundary() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.6, 0.8).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn chart_orientation_matches_complex_structure() {
        // Near the origin the chart differential is twice the identity, so J
        // agrees with multiplication by i.
        let eps = 1e-6;
        let a = disk_to_chart(DiskPoint::new(eps, 0.0).unwrap());
        let b = disk_to_chart(DiskPoint::new(0.0, eps).unwrap());
        assert!((a.x1 / eps).abs() < 1e-5 && (a.x2 / eps - 2.0).abs() < 1e-5);
        assert!((b.x1 / eps + 2.0).abs() < 1e-5 && (b.x2 / eps).abs() < 1e-5);
        let jx = apply_j(ChartPoint::ORIGIN, [a.x1 / eps, a.x2 / eps]);
        assert!((jx[0] - b.x1 / eps).abs() < 1e-5);
        assert!((jx[1] - b.x2 / eps).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn embedding_lands_on_hyperboloid(p in pt()) {
            let v = embed_iwasawa(p);
            prop_assert!((v.form(&v) - 1.0).abs() < 1e-12 * v.x0 * v.x0);
            prop_assert!(v.x0 > 0.0);
            let back = chart_from_hyperboloid(v);
            prop_assert!((back.x1 - p.x1).abs() < 1e-10 && (back.x2 - p.x2).abs() < 1e-10);
        }

        #[test]
        fn inverse_metric(p in pt()) {
            let m = metric_at(p);
            prop_assert!((m.inv11 * m.h11 - 1.0).abs() < 1e-14);
            prop_assert!((m.sqrt_det * m.sqrt_det - m.h11 * m.h22).abs() < 1e-14 * m.h11);
        }

        #[test]
        fn christoffel_symmetric(p in pt()) {
            let g = christoffel_at(p).gamma;
            for k in 0..2 { prop_assert_eq!(g[k][0][1], g[k][1][0]); }
        }

        #[test]
        fn distance_symmetric_and_matches_embedding(p in pt(), q in pt()) {
            let d = geodesic_distance(p, q);
            prop_assert!((d - geodesic_distance(q, p)).abs() <= 1e-12 * (1.0 + d));
            let oracle = geodesic_distance_embedded(p, q);
            // arccosh loses ~sqrt(eps) near coincidence; compare loosely there.
            prop_assert!((d - oracle).abs() < 1e-7 + 1e-10 * d);
        }

        #[test]
        fn triangle_inequality(p in pt(), q in pt(), r in pt()) {
            let (a, b, c) = (geodesic_distance(p, q), geodesic_distance(q, r), geodesic_distance(p, r));
            prop_assert!(c <= a + b + 1e-9 * (1.0 + c));
        }

        #[test]
        fn j_is_complex_structure(p in pt(), v1 in -3.0..3.0f64, v2 in -3.0..3.0f64) {
            let v = [v1, v2];
            let jv = apply_j(p, v);
            let jjv = apply_j(p, jv);
            let scale = 1.0 + p.x2.abs().exp() * (v1.abs() + v2.abs());
            prop_assert!((jjv[0] + v1).abs() < 1e-12 * scale && (jjv[1] + v2).abs() < 1e-12 * scale);
            let m = metric_at(p);
            prop_assert!((m.norm(jv) - m.norm(v)).abs() < 1e-12 * (1.0 + m.norm(v)));
            prop_assert!(m.inner(jv, v).abs() < 1e-12 * (1.0 + m.inner(v, v)));
        }

        #[test]
        fn theta_is_orthonormal(p in pt()) {
            let (t1, t2) = frame_theta(p);
            let m = metric_at(p);
            prop_assert!((m.inner(t1, t1) - 1.0).abs() < 1e-13);
            prop_assert!((m.inner(t2, t2) - 1.0).abs() < 1e-13);
            prop_assert!(m.inner(t1, t2).abs() < 1e-13);
            let jt1 = apply_j(p, t1);
            prop_assert!((jt1[0] - t2[0]).abs() < 1e-13 && (jt1[1] - t2[1]).abs() < 1e-13);
        }

        #[test]
        fn disk_round_trip_and_isometry(r1 in 0.0..0.9f64, a1 in 0.0..6.3f64, r2 in 0.0..0.9f64, a2 in 0.0..6.3f64) {
            let z1 = DiskPoint::new(r1 * a1.cos(), r1 * a1.sin()).unwrap();
            let z2 = DiskPoint::new(r2 * a2.cos(), r2 * a2.sin()).unwrap();
            let c1 = disk_to_chart(z1);
            let back = chart_to_disk(c1);
            prop_assert!((back.re - z1.re).abs() < 1e-12 && (back.im - z1.im).abs() < 1e-12);
            let dd = disk_distance(z1, z2);
            let dc = geodesic_distance(c1, disk_to_chart(z2));
            prop_assert!((dd - dc).abs() < 1e-10 * (1.0 + dd) || (dd < 1e-6 && dc < 1e-6));
        }
    }
}
