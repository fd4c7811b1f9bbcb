//! Discrete fields on a truncated rectangle of the Iwasawa chart.
//!
//! Storage is flat and row-major: node `(i, j)` with `i` along `x1` and `j`
//! along `x2` sits at index `j * n1 + i`. Two-component fields keep both
//! components in one buffer, first component first, so that integrators can
//! treat a field as a single slice.
//!
//! Dirichlet data lives in the field itself: the boundary ring of a
//! [`MapField`] holds the pinned values and every evolution right-hand side
//! is zero there.

mod grid;
pub mod io;
pub mod norms;
pub mod ops;

pub use grid::{Dir, Grid};
pub use norms::{lp_norm_scalar, lp_norm_tangent, sup_distance, Norm};
pub use ops::{
    discrete_dirichlet_energy, energy_density, laplace_beltrami, laplace_beltrami_conservative, partial,
    pullback_covariant_derivative, second_partial, tension_field, tension_field_pointwise,
};

use crate::error::{Error, Result};
use crate::geometry::ChartPoint;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                values.push(f(grid.x1(i), grid.x2(j)));
            }
        }
        Self { grid, values }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }
}

/// A map from the grid into the target chart, `(u1, u2)` per node.
#[derive(Clone, Debug, PartialEq)]
pub struct MapField {
    pub grid: Grid,
    /// `[u1 | u2]`, each of length `grid.len()`.
    pub data: Vec<f64>,
}

/// A section of the pullback tangent bundle, coordinate components at `u(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentField {
    pub grid: Grid,
    /// `[X1 | X2]`, each of length `grid.len()`.
    pub data: Vec<f64>,
}

macro_rules! two_component {
    ($t:ident, $a:ident, $b:ident, $am:ident, $bm:ident) => {
        impl $t {
            pub fn zeros(grid: Grid) -> Self {
                Self {
                    grid,
                    data: vec![0.0; 2 * grid.len()],
                }
            }

            pub fn from_components(grid: Grid, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
                if a.len() != grid.len() || b.len() != grid.len() {
                    return Err(Error::GridMismatch(format!(
                        "component lengths {} and {} for a grid of {} nodes",
                        a.len(),
                        b.len(),
                        grid.len()
                    )));
                }
                let mut data = a;
                data.extend_from_slice(&b);
                Ok(Self { grid, data })
            }

            pub fn $a(&self) -> &[f64] {
                &self.data[..self.grid.len()]
            }

            pub fn $b(&self) -> &[f64] {
                &self.data[self.grid.len()..]
            }

            pub fn $am(&mut self) -> &mut [f64] {
                let n = self.grid.len();
                &mut self.data[..n]
            }

            pub fn $bm(&mut self) -> &mut [f64] {
                let n = self.grid.len();
                &mut self.data[n..]
            }

            pub fn at(&self, k: usize) -> [f64; 2] {
                [self.data[k], self.data[self.grid.len() + k]]
            }

            pub fn set(&mut self, k: usize, v: [f64; 2]) {
                let n = self.grid.len();
                self.data[k] = v[0];
                self.data[n + k] = v[1];
            }

            pub fn is_finite(&self) -> bool {
                self.data.iter().all(|v| v.is_finite())
            }
        }
    };
}

two_component!(MapField, u1, u2, u1_mut, u2_mut);
two_component!(TangentField, x1, x2, x1_mut, x2_mut);

impl MapField {
    pub fn from_fn(grid: Grid, f: impl Fn(ChartPoint) -> ChartPoint) -> Self {
        let n = grid.len();
        let mut data = vec![0.0; 2 * n];
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                let k = grid.idx(i, j);
                let p = f(grid.point(i, j));
                data[k] = p.x1;
                data[n + k] = p.x2;
            }
        }
        Self { grid, data }
    }

    pub fn identity(grid: Grid) -> Self {
        Self::from_fn(grid, |p| p)
    }

    pub fn constant(grid: Grid, p: ChartPoint) -> Self {
        Self::from_fn(grid, |_| p)
    }

    pub fn point(&self, k: usize) -> ChartPoint {
        let [a, b] = self.at(k);
        ChartPoint::new(a, b)
    }

    /// True when the boundary rings of `self` and `other` agree exactly.
    pub fn same_boundary(&self, other: &MapField) -> bool {
        self.grid == other.grid
            && self
                .grid
                .boundary_indices()
                .all(|k| self.at(k) == other.at(k))
    }
}

impl TangentField {
    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }
}

pub(crate) fn check_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}
