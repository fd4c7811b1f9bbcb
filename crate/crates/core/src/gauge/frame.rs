//! Orthonormal frames along maps and their transport in `s`.

use super::tower::HeatTower;
use crate::error::{Error, Result};
use crate::fields::{check_same_grid, MapField, TangentField};
use crate::geometry::apply_j_at;

/// Largest norm drift tolerated in one transport step before renormalizing.
pub const TRANSPORT_DRIFT_TOL: f64 = 1e-6;

/// First leg `e1` of an orthonormal frame along a map; `e2 = J e1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub e1: TangentField,
}

impl Frame {
    /// The global frame `Theta_1 = e^{u2} d/dy1` along `u`.
    pub fn theta(u: &MapField) -> Self {
        Self::from_angles(u, &vec![0.0; u.grid.len()])
    }

    /// `e1 = cos(theta) Theta_1 + sin(theta) Theta_2` along `u`.
    pub fn from_angles(u: &MapField, angle: &[f64]) -> Self {
        let n = u.grid.len();
        let mut e1 = TangentField::zeros(u.grid);
        for k in 0..n {
            let (s, c) = angle[k].sin_cos();
            e1.set(k, [c * u.u2()[k].exp(), s]);
        }
        Self { e1 }
    }

    /// Angle of `e1` measured in the global frame at each node.
    pub fn angles(&self, u: &MapField) -> Vec<f64> {
        (0..u.grid.len())
            .map(|k| {
                let [a, b] = self.e1.at(k);
                b.atan2((-u.u2()[k]).exp() * a)
            })
            .collect()
    }

    pub fn e2(&self, u: &MapField) -> TangentField {
        let mut out = TangentField::zeros(u.grid);
        for k in 0..u.grid.len() {
            out.set(k, apply_j_at(u.u2()[k], self.e1.at(k)));
        }
        out
    }

    /// Largest `| |e1|_g - 1 |` over the grid.
    pub fn orthonormality_defect(&self, u: &MapField) -> f64 {
        (0..u.grid.len())
            .map(|k| (norm_at(u.u2()[k], self.e1.at(k)) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise rotation `e1 -> cos(chi) e1 + sin(chi) J e1`.
    pub fn rotated(&self, u: &MapField, chi: &[f64]) -> Self {
        let mut e1 = self.e1.clone();
        for k in 0..u.grid.len() {
            let a = self.e1.at(k);
            let b = apply_j_at(u.u2()[k], a);
            let (s, c) = chi[k].sin_cos();
            e1.set(k, [c * a[0] + s * b[0], c * a[1] + s * b[1]]);
        }
        Self { e1 }
    }
}

fn norm_at(u2: f64, v: [f64; 2]) -> f64 {
    let a = (-u2).exp() * v[0];
    (a * a + v[1] * v[1]).sqrt()
}

/// Parallel transport of `seed` (a frame along the final checkpoint) back
/// to every checkpoint, renormalizing after each step.
///
/// The transport equation is integrated in components along the global
/// frame, where it reads `dc/ds = -omega J c` with
/// `omega = e^{-u2} d_s u1`. The implicit midpoint rule with midpoint
/// values of `u2` and `d_s u1` turns each step into an exact rotation by
/// `2 atan(omega ds / 2)`.
pub fn transport_frame(tower: &HeatTower, seed: &Frame) -> Result<Vec<Frame>> {
    Ok(transport_frame_with_drift(tower, seed, TRANSPORT_DRIFT_TOL)?.0)
}

/// [`transport_frame`] with an explicit drift tolerance; also returns the
/// largest norm drift seen before renormalization.
pub fn transport_frame_with_drift(tower: &HeatTower, seed: &Frame, tol: f64) -> Result<(Vec<Frame>, f64)> {
    let last = tower.limit();
    check_same_grid(&seed.e1.grid, &last.grid)?;
    let n = last.grid.len();
    let m = tower.len();
    let mut frames = vec![seed.clone(); m];
    let mut worst = 0.0f64;
    for c in (0..m.saturating_sub(1)).rev() {
        let (lo, hi) = (&tower.u_of_s[c], &tower.u_of_s[c + 1]);
        let mut e = frames[c + 1].e1.clone();
        for k in 0..n {
            let x = frames[c + 1].e1.at(k);
            let comp = [(-hi.u2()[k]).exp() * x[0], x[1]];
            let norm = comp[0].hypot(comp[1]);
            worst = worst.max((norm - 1.0).abs());
            if (norm - 1.0).abs() > tol {
                return Err(Error::TransportStep {
                    checkpoint: c + 1,
                    drift: (norm - 1.0).abs(),
                });
            }
            // omega * ds with midpoint values
            let turn = (-0.5 * (hi.u2()[k] + lo.u2()[k])).exp() * (hi.u1()[k] - lo.u1()[k]);
            let (sn, cs) = (2.0 * (0.5 * turn).atan()).sin_cos();
            let r = [
                (cs * comp[0] - sn * comp[1]) / norm,
                (sn * comp[0] + cs * comp[1]) / norm,
            ];
            e.set(k, [lo.u2()[k].exp() * r[0], r[1]]);
        }
        frames[c].e1 = e;
    }
    Ok((frames, worst))
}

/// Per-node angle `chi` such that rotating `frame` by `chi` makes it the
/// global frame at the base map `u`.
pub fn limit_gauge_rotation(frame: &Frame, u: &MapField) -> Vec<f64> {
    frame.angles(u).into_iter().map(|a| -a).collect()
}

/// Applies one rigid rotation field to every frame of a family.
pub fn rotate_all(frames: &[Frame], maps: &[MapField], chi: &[f64]) -> Vec<Frame> {
    frames
        .iter()
        .zip(maps)
        .map(|(f, u)| f.rotated(u, chi))
        .collect()
}

/// Caloric frames along a tower: transported from an arbitrary `seed`
/// and then pinned to the global frame at the final checkpoint.
pub fn caloric_frames(tower: &HeatTower, seed: &Frame) -> Result<Vec<Frame>> {
    let frames = transport_frame(tower, seed)?;
    let chi = limit_gauge_rotation(frames.last().unwrap(), tower.limit());
    Ok(rotate_all(&frames, &tower.u_of_s, &chi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use crate::gauge::tower::{build_heat_tower, TowerSpec};
    use crate::geometry::ChartPoint;
    use crate::harmonic::{perturb, to_chart, HolomorphicMapSpec, PerturbSpec};
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::new((-2.0, 2.0), (-1.5, 1.5), 17, 17).unwrap()
    }

    fn bumped_tower() -> HeatTower {
        let g = Grid::new((-2.0, 2.0), (-1.5, 1.5), 33, 33).unwrap();
        let q = to_chart(&HolomorphicMapSpec::linear(0.5).unwrap(), &g);
        let u0 = perturb(&q, &PerturbSpec { center: [0.0, 0.0], radius: 1.0, amplitude: 0.2, angle: 0.7 }).unwrap();
        build_heat_tower(&u0, &TowerSpec { s_max: 30.0, ds: 0.1, tail_tol: 1e-7 }, 0.0).unwrap()
    }

    #[test]
    fn theta_frame_has_zero_angle() {
        let u = MapField::from_fn(grid(), |p| ChartPoint::new(p.x2, 0.5 * p.x1));
        let f = Frame::theta(&u);
        assert!(f.angles(&u).iter().all(|a| a.abs() < 1e-15));
        assert!(f.orthonormality_defect(&u) < 1e-14);
        assert!(limit_gauge_rotation(&f, &u).iter().all(|a| a.abs() < 1e-15));
    }

    #[test]
    fn stationary_tower_keeps_frame() {
        let u = MapField::constant(grid(), ChartPoint::new(0.3, -0.2));
        let tower = crate::gauge::tower::build_heat_tower_fixed(&u, 0.1, 5, 0.0).unwrap();
        let seed = Frame::from_angles(&u, &vec![0.4; u.grid.len()]);
        let frames = transport_frame(&tower, &seed).unwrap();
        for f in &frames {
            assert!((f.e1.data.iter().zip(&seed.e1.data)).all(|(a, b)| (a - b).abs() < 1e-14));
        }
    }

    #[test]
    fn transport_keeps_unit_norm_and_j_orthogonality() {
        let tower = bumped_tower();
        let frames = caloric_frames(&tower, &Frame::theta(tower.limit())).unwrap();
        for (f, u) in frames.iter().zip(&tower.u_of_s) {
            assert!(f.orthonormality_defect(u) < 1e-12);
            let e2 = f.e2(u);
            for k in 0..u.grid.len() {
                let m = crate::geometry::metric_at(u.point(k));
                assert!(m.inner(f.e1.at(k), e2.at(k)).abs() < 1e-13);
            }
        }
        let last = frames.last().unwrap().angles(tower.limit());
        assert!(last.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn caloric_frames_do_not_depend_on_seed() {
        let tower = bumped_tower();
        let u = tower.limit();
        let a = caloric_frames(&tower, &Frame::theta(u)).unwrap();
        let seed = Frame::from_angles(u, &(0..u.grid.len()).map(|k| 0.3 + 0.01 * k as f64).collect::<Vec<_>>());
        let b = caloric_frames(&tower, &seed).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let d = x.e1.data.iter().zip(&y.e1.data).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(d < 1e-12, "{d}");
        }
    }

    #[test]
    fn alignment_with_theta_converges_along_s() {
        let tower = bumped_tower();
        let frames = caloric_frames(&tower, &Frame::theta(tower.limit())).unwrap();
        let mis: Vec<f64> = frames
            .iter()
            .zip(&tower.u_of_s)
            .map(|(f, u)| f.angles(u).iter().fold(0.0, |m: f64, a| m.max(a.abs())))
            .collect();
        assert!(mis[0] > 1e-3);
        let tail = &mis[mis.len() * 3 / 4..];
        for w in tail.windows(2) {
            assert!(w[1] <= w[0] + 1e-14);
        }
    }

    proptest! {
        #[test]
        fn rotation_round_trip(angles in proptest::collection::vec(-3.0..3.0f64, 289), chi in proptest::collection::vec(-3.0..3.0f64, 289)) {
            let u = MapField::from_fn(grid(), |p| ChartPoint::new(0.4 * p.x1, 0.3 * p.x2 + 0.1));
            let f = Frame::from_angles(&u, &angles);
            let back: Vec<f64> = chi.iter().map(|c| -c).collect();
            let g = f.rotated(&u, &chi).rotated(&u, &back);
            for (a, b) in f.e1.data.iter().zip(&g.e1.data) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let pinned = f.rotated(&u, &limit_gauge_rotation(&f, &u));
            for k in 0..u.grid.len() {
                let (c1, _) = crate::geometry::frame_theta(u.point(k));
                let m = crate::geometry::metric_at(u.point(k));
                prop_assert!(m.inner(pinned.e1.at(k), c1) >= 1.0 - 1e-8);
            }
        }
    }
}
