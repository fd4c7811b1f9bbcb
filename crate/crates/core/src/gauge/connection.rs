//! Connection coefficients from the `s`-integral of curvature along a
//! tower, independent of any frame.

use super::bundle::{connection_from_frame, map_partials, wedge_of_tangents};
use super::frame::Frame;
use super::tower::HeatTower;
use crate::error::Result;
use crate::fields::{check_same_grid, tension_field, Dir, MapField, TangentField};

#[derive(Clone, Debug)]
pub struct IntegralConnection {
    pub s_grid: Vec<f64>,
    /// `A_1` at each checkpoint.
    pub a1: Vec<Vec<f64>>,
    /// `A_2` at each checkpoint.
    pub a2: Vec<Vec<f64>>,
    /// `A_t` at each checkpoint, when velocities were supplied.
    pub at: Option<Vec<Vec<f64>>>,
    /// Extrapolated tail beyond the last checkpoint, not included above.
    pub tail_bound: f64,
    pub warning: Option<String>,
}

/// Backward cumulative trapezoid: `out[k] = int_{s_k}^{s_end} f`.
fn tail_integrals(s: &[f64], f: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = s.len();
    let n = f[0].len();
    let mut out = vec![vec![0.0; n]; m];
    for c in (0..m - 1).rev() {
        let h = 0.5 * (s[c + 1] - s[c]);
        let (lo, hi) = out.split_at_mut(c + 1);
        for x in 0..n {
            lo[c][x] = hi[0][x] + h * (f[c][x] + f[c + 1][x]);
        }
    }
    out
}

/// `A_i(s) = A_i[Theta(q)] - int_s^{s_end} phi_s wedge phi_i ds'` and
/// `A_t(s) = -int_s^{s_end} phi_s wedge phi_t ds'`, where `q` is the limit
/// map carrying the global frame and `velocities[k]` is `d_t u` at
/// checkpoint `k`.
pub fn connection_from_integral(
    tower: &HeatTower,
    q: &MapField,
    velocities: Option<&[TangentField]>,
    tail_tol: f64,
) -> Result<IntegralConnection> {
    check_same_grid(&tower.limit().grid, &q.grid)?;
    let theta = Frame::theta(q);
    let boundary = [
        connection_from_frame(q, &theta, Dir::X1)?,
        connection_from_frame(q, &theta, Dir::X2)?,
    ];
    let mut f1 = Vec::with_capacity(tower.len());
    let mut f2 = Vec::with_capacity(tower.len());
    let mut ft = Vec::with_capacity(tower.len());
    for (k, u) in tower.u_of_s.iter().enumerate() {
        let tau = tension_field(u);
        let [d1, d2] = map_partials(u);
        f1.push(wedge_of_tangents(u, &tau, &d1));
        f2.push(wedge_of_tangents(u, &tau, &d2));
        if let Some(v) = velocities {
            ft.push(wedge_of_tangents(u, &tau, &v[k]));
        }
    }
    let shift = |b: &[f64], i: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        i.into_iter()
            .map(|row| b.iter().zip(row).map(|(x, y)| x - y).collect())
            .collect()
    };
    let a1 = shift(&boundary[0], tail_integrals(&tower.s_grid, &f1));
    let a2 = shift(&boundary[1], tail_integrals(&tower.s_grid, &f2));
    let at = velocities.map(|_| {
        let zero = vec![0.0; q.grid.len()];
        shift(&zero, tail_integrals(&tower.s_grid, &ft))
    });
    let warning = (!(tower.tail_bound <= tail_tol)).then(|| {
        format!(
            "tail bound {:.3e} exceeds tolerance {:.3e}",
            tower.tail_bound, tail_tol
        )
    });
    Ok(IntegralConnection {
        s_grid: tower.s_grid.clone(),
        a1,
        a2,
        at,
        tail_bound: tower.tail_bound,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use crate::gauge::tower::build_heat_tower_fixed;
    use crate::geometry::ChartPoint;

    #[test]
    fn trapezoid_tails() {
        let s = [0.0, 0.5, 1.0];
        let f = vec![vec![1.0], vec![1.0], vec![1.0]];
        let t = tail_integrals(&s, &f);
        assert_eq!(t, vec![vec![1.0], vec![0.5], vec![0.0]]);
    }

    #[test]
    fn harmonic_data_gives_boundary_term() {
        let g = Grid::new((-1.0, 1.0), (-1.0, 1.0), 13, 13).unwrap();
        let q = MapField::constant(g, ChartPoint::new(0.2, 0.1));
        let tower = build_heat_tower_fixed(&q, 0.1, 3, 0.0).unwrap();
        let c = connection_from_integral(&tower, &q, None, 1e-8).unwrap();
        assert!(c.a1.iter().flatten().chain(c.a2.iter().flatten()).all(|a| *a == 0.0));
        assert!(c.at.is_none());
    }
}
