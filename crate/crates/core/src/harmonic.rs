//! Holomorphic self-maps of the disk as harmonic maps in the chart, their
//! admissibility diagnostics, and compactly supported perturbations.

use crate::error::{Error, Result};
use crate::fields::norms::integrate;
use crate::fields::{
    energy_density, partial, pullback_covariant_derivative, Dir, Grid, MapField, TangentField,
};
use crate::flows::bochner::hessian_sq;
use crate::geometry::{
    chart_to_disk, disk_to_chart, distance_from_origin, geodesic_distance, metric_at, ChartPoint,
    DiskPoint,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Polynomial `f(z) = sum_k a_k z^k`, coefficients as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HolomorphicMapSpec {
    pub coefficients: Vec<[f64; 2]>,
}

impl HolomorphicMapSpec {
    /// Validates `sum |a_k| < 1`, which keeps `f(closed disk)` inside the open disk.
    pub fn new(coefficients: Vec<[f64; 2]>) -> Result<Self> {
        let s = Self { coefficients };
        s.validate()?;
        Ok(s)
    }

    /// `f(z) = lambda z`.
    pub fn linear(lambda: f64) -> Result<Self> {
        Self::new(vec![[0.0, 0.0], [lambda, 0.0]])
    }

    pub fn identity() -> Self {
        Self {
            coefficients: vec![[0.0, 0.0], [1.0, 0.0]],
        }
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c[0].hypot(c[1])).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam {
                field: "coefficients".into(),
                reason: "non-finite coefficient".into(),
            });
        }
        let s = self.coefficient_sum();
        if s >= 1.0 {
            return Err(Error::InvalidParam {
                field: "coefficients".into(),
                reason: format!("sum of |a_k| is {s}, must be < 1"),
            });
        }
        Ok(())
    }

    fn horner(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + Complex64::new(c[0], c[1]))
    }
}

/// `f(z)`. The identity spec is allowed here even though it is not strict.
pub fn eval_holomorphic(spec: &HolomorphicMapSpec, z: DiskPoint) -> DiskPoint {
    let w = spec.horner(z.as_complex());
    DiskPoint { re: w.re, im: w.im }
}

/// Pulls each node through chart -> disk, applies `f`, and pushes back.
pub fn to_chart(spec: &HolomorphicMapSpec, grid: &Grid) -> MapField {
    MapField::from_fn(*grid, |p| {
        let z = chart_to_disk(p);
        disk_to_chart(eval_holomorphic(spec, z))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub d_l2: f64,
    pub grad_d_l2: f64,
    pub grad2_d_l2: f64,
    /// Largest distance of an image point from the chart origin.
    pub range_radius: f64,
    /// `max e^{r(x)} |dQ(x)|` with `r` the distance to the chart origin.
    pub weighted_sup: f64,
}

/// `|nabla nabla dQ|^2` from nested covariant derivatives (first order accurate).
fn third_derivative_sq(u: &MapField) -> Result<Vec<f64>> {
    let g = u.grid;
    let d = |dir: Dir| {
        TangentField::from_components(g, partial(&g, u.u1(), dir), partial(&g, u.u2(), dir))
    };
    let du = [d(Dir::X1)?, d(Dir::X2)?];
    let dirs = [Dir::X1, Dir::X2];
    let n = g.len();
    // Domain Christoffel symbols as functions of x2.
    let gamma = |k: usize, i: usize, j: usize, x2: f64| -> f64 {
        match (k, i, j) {
            (0, 0, 1) | (0, 1, 0) => -1.0,
            (1, 0, 0) => (-2.0 * x2).exp(),
            _ => 0.0,
        }
    };
    let x2_of = |k: usize| g.x2(g.coords(k).1);
    // Hessian H[j][k] as tangent fields.
    let mut hess: Vec<Vec<TangentField>> = Vec::new();
    for j in 0..2 {
        let mut row = Vec::new();
        for kk in 0..2 {
            let mut h = pullback_covariant_derivative(&du[kk], u, dirs[j])?;
            for m in 0..n {
                let x2 = x2_of(m);
                for l in 0..2 {
                    let c = gamma(l, j, kk, x2);
                    if c != 0.0 {
                        let v = du[l].at(m);
                        let cur = h.at(m);
                        h.set(m, [cur[0] - c * v[0], cur[1] - c * v[1]]);
                    }
                }
            }
            row.push(h);
        }
        hess.push(row);
    }
    let mut out = vec![0.0; n];
    for i in 0..2 {
        for j in 0..2 {
            for kk in 0..2 {
                let mut t = pullback_covariant_derivative(&hess[j][kk], u, dirs[i])?;
                for m in 0..n {
                    let x2 = x2_of(m);
                    let mut cur = t.at(m);
                    for l in 0..2 {
                        let a = gamma(l, i, j, x2);
                        let b = gamma(l, i, kk, x2);
                        let hl = hess[l][kk].at(m);
                        let hj = hess[j][l].at(m);
                        cur[0] -= a * hl[0] + b * hj[0];
                        cur[1] -= a * hl[1] + b * hj[1];
                    }
                    t.set(m, cur);
                }
                for m in 0..n {
                    let x2 = x2_of(m);
                    let w = |d: usize| if d == 0 { (2.0 * x2).exp() } else { 1.0 };
                    let v = t.at(m);
                    out[m] += w(i) * w(j) * w(kk) * metric_at(u.point(m)).inner(v, v);
                }
            }
        }
    }
    Ok(out)
}

pub fn admissibility_report(q: &MapField) -> Result<AdmissibilityReport> {
    let g = q.grid;
    let e = energy_density(q).values;
    let d_sq: Vec<f64> = e.iter().map(|v| 2.0 * v).collect();
    let hs = hessian_sq(q)?;
    let ts = third_derivative_sq(q)?;
    let range_radius = (0..g.len())
        .map(|k| distance_from_origin(q.point(k)))
        .fold(0.0, f64::max);
    let weighted_sup = (0..g.len())
        .map(|k| {
            let (i, j) = g.coords(k);
            distance_from_origin(g.point(i, j)).exp() * d_sq[k].sqrt()
        })
        .fold(0.0, f64::max);
    Ok(AdmissibilityReport {
        d_l2: integrate(&g, &d_sq).sqrt(),
        grad_d_l2: integrate(&g, &hs).sqrt(),
        grad2_d_l2: integrate(&g, &ts).sqrt(),
        range_radius,
        weighted_sup,
    })
}

/// Smooth bump `exp(1 - 1/(1 - s^2))` for `s < 1`, zero otherwise; equals 1 at `s = 0`.
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Perturbation parameters: a geodesic ball in the domain and a direction
/// in the target frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
    /// Angle of the displacement from `Theta_1` towards `Theta_2`.
    #[serde(default)]
    pub angle: f64,
}

/// `Q + amplitude * bump(d(x, center) / radius) * (cos a Theta_1 + sin a Theta_2)(Q(x))`,
/// added in target coordinates. Nodes outside the ball are copied unchanged.
pub fn perturb(q: &MapField, spec: &PerturbSpec) -> Result<MapField> {
    if !(spec.radius > 0.0) || !spec.amplitude.is_finite() {
        return Err(Error::InvalidParam {
            field: "perturbation".into(),
            reason: "radius must be > 0 and amplitude finite".into(),
        });
    }
    let g = q.grid;
    let c = ChartPoint::new(spec.center[0], spec.center[1]);
    let mut out = q.clone();
    if spec.amplitude == 0.0 {
        return Ok(out);
    }
    let (ca, sa) = (spec.angle.cos(), spec.angle.sin());
    for k in 0..g.len() {
        let (i, j) = g.coords(k);
        let d = geodesic_distance(g.point(i, j), c);
        if d >= spec.radius {
            continue;
        }
        if g.is_boundary(i, j) {
            return Err(Error::InvalidParam {
                field: "perturbation".into(),
                reason: format!("support ball reaches the boundary ring at node ({i}, {j})"),
            });
        }
        let b = spec.amplitude * bump(d / spec.radius);
        let [u1, u2] = q.at(k);
        out.set(k, [u1 + b * ca * u2.exp(), u2 + b * sa]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{lp_norm_tangent, sup_distance, tension_field, Norm};
    use crate::flows::dirichlet_energy;
    use proptest::prelude::*;

    fn grid(n: usize) -> Grid {
        Grid::new((-2.0, 2.0), (-1.5, 1.5), n, n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(HolomorphicMapSpec::linear(0.5).is_ok());
        assert!(HolomorphicMapSpec::linear(1.0).is_err());
        assert!(HolomorphicMapSpec::new(vec![[0.3, 0.4], [0.0, 0.6]]).is_err());
    }

    #[test]
    fn eval_examples() {
        let f = HolomorphicMapSpec::linear(0.5).unwrap();
        let z = eval_holomorphic(&f, DiskPoint::new(0.0, 0.0).unwrap());
        assert_eq!((z.re, z.im), (0.0, 0.0));
        let z = eval_holomorphic(&f, DiskPoint::new(0.8, 0.0).unwrap());
        assert!((z.re - 0.4).abs() < 1e-15 && z.im == 0.0);
    }

    #[test]
    fn identity_and_zero_specs() {
        let g = grid(12);
        let q = to_chart(&HolomorphicMapSpec::identity(), &g);
        let id = MapField::identity(g);
        for (a, b) in q.data.iter().zip(&id.data) {
            assert!((a - b).abs() < 1e-12);
        }
        let zero = to_chart(&HolomorphicMapSpec::new(vec![[0.0, 0.0]]).unwrap(), &g);
        assert!(zero.data.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn linear_maps_are_harmonic_at_second_order() {
        for lambda in [0.25, 0.5, 0.75] {
            let f = HolomorphicMapSpec::linear(lambda).unwrap();
            let t = |n: usize| {
                let q = to_chart(&f, &grid(n));
                lp_norm_tangent(&tension_field(&q), &q, Norm::L2).unwrap()
            };
            let (a, b) = (t(17), t(33));
            assert!((a / b).log2() >= 1.8, "lambda {lambda}: order {}", (a / b).log2());
        }
    }

    #[test]
    fn report_examples() {
        let g = grid(17);
        let c = MapField::constant(g, ChartPoint::new(0.2, 0.1));
        let r = admissibility_report(&c).unwrap();
        for v in [r.d_l2, r.grad_d_l2, r.grad2_d_l2, r.weighted_sup] {
            assert!(v < 1e-12);
        }
        let mut last = 0.0;
        for lambda in [0.25, 0.5, 0.75] {
            let q = to_chart(&HolomorphicMapSpec::linear(lambda).unwrap(), &g);
            let r = admissibility_report(&q).unwrap();
            assert!(r.d_l2 > last);
            assert!(r.grad2_d_l2.is_finite() && r.range_radius.is_finite());
            last = r.d_l2;
        }
        let ratio = |l: f64| {
            let q = to_chart(&HolomorphicMapSpec::linear(l).unwrap(), &g);
            admissibility_report(&q).unwrap().d_l2 / l
        };
        let (a, b) = (ratio(0.05), ratio(0.1));
        assert!((a / b - 1.0).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn perturb_examples() {
        let g = grid(33);
        let q = to_chart(&HolomorphicMapSpec::linear(0.5).unwrap(), &g);
        let mut spec = PerturbSpec { center: [0.0, 0.0], radius: 1.0, amplitude: 0.0, angle: 0.3 };
        assert_eq!(perturb(&q, &spec).unwrap(), q);
        spec.amplitude = 1e-3;
        let u = perturb(&q, &spec).unwrap();
        let d = sup_distance(&u, &q).unwrap();
        assert!((d - 1e-3).abs() < 1e-5, "{d}");
        spec.amplitude = 0.2;
        let u = perturb(&q, &spec).unwrap();
        assert!(dirichlet_energy(&u) > dirichlet_energy(&q));
        spec.radius = 3.0;
        assert!(perturb(&q, &spec).is_err());
    }

    proptest! {
        #[test]
        fn image_stays_in_disk(re in -1.0..1.0f64, im in -1.0..1.0f64, a in 0.0..0.5f64, b in 0.0..0.45f64) {
            prop_assume!(re * re + im * im < 1.0);
            let f = HolomorphicMapSpec::new(vec![[0.0, 0.04], [a, 0.0], [0.0, b]]).unwrap();
            let w = eval_holomorphic(&f, DiskPoint::new(re, im).unwrap());
            prop_assert!(w.re * w.re + w.im * w.im < 1.0);
        }

        #[test]
        fn perturb_only_inside_ball(cx in -0.5..0.5f64, cy in -0.4..0.4f64, r in 0.2..0.8f64, amp in -0.3..0.3f64) {
            let g = grid(20);
            let q = to_chart(&HolomorphicMapSpec::linear(0.5).unwrap(), &g);
            let spec = PerturbSpec { center: [cx, cy], radius: r, amplitude: amp, angle: 1.0 };
            let u = perturb(&q, &spec).unwrap();
            for k in 0..g.len() {
                let (i, j) = g.coords(k);
                if geodesic_distance(g.point(i, j), ChartPoint::new(cx, cy)) >= r {
                    prop_assert_eq!(u.at(k), q.at(k));
                }
            }
        }
    }
}
