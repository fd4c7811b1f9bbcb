use crate::error::{Error, Result};
use crate::geometry::ChartPoint;
use serde::{Deserialize, Serialize};

/// Coordinate direction on the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    X1,
    X2,
}

/// Uniform node grid on `[x1_min, x1_max] x [x2_min, x2_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub n1: usize,
    pub n2: usize,
}

impl Grid {
    pub fn new(x1: (f64, f64), x2: (f64, f64), n1: usize, n2: usize) -> Result<Self> {
        let g = Self {
            x1_min: x1.0,
            x1_max: x1.1,
            x2_min: x2.0,
            x2_max: x2.1,
            n1,
            n2,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi) in [
            ("x1_range", self.x1_min, self.x1_max),
            ("x2_range", self.x2_min, self.x2_max),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParam {
                    field: name.into(),
                    reason: format!("expected finite lo < hi, got [{lo}, {hi}]"),
                });
            }
        }
        for (name, n) in [("n1", self.n1), ("n2", self.n2)] {
            if n < 8 {
                return Err(Error::InvalidParam {
                    field: name.into(),
                    reason: format!("need at least 8 nodes, got {n}"),
                });
            }
        }
        Ok(())
    }

    /// The grid with every spacing halved (`n -> 2n - 1`).
    pub fn refined(&self) -> Self {
        Self {
            n1: 2 * self.n1 - 1,
            n2: 2 * self.n2 - 1,
            ..*self
        }
    }

    pub fn h1(&self) -> f64 {
        (self.x1_max - self.x1_min) / (self.n1 - 1) as f64
    }

    pub fn h2(&self) -> f64 {
        (self.x2_max - self.x2_min) / (self.n2 - 1) as f64
    }

    pub fn h(&self, d: Dir) -> f64 {
        match d {
            Dir::X1 => self.h1(),
            Dir::X2 => self.h2(),
        }
    }

    pub fn x1(&self, i: usize) -> f64 {
        if i == self.n1 - 1 {
            self.x1_max
        } else {
            self.x1_min + i as f64 * self.h1()
        }
    }

    pub fn x2(&self, j: usize) -> f64 {
        if j == self.n2 - 1 {
            self.x2_max
        } else {
            self.x2_min + j as f64 * self.h2()
        }
    }

    pub fn point(&self, i: usize, j: usize) -> ChartPoint {
        ChartPoint::new(self.x1(i), self.x2(j))
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.n1, k / self.n1)
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n1 - 1 || j == self.n2 - 1
    }

    pub fn boundary_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| {
            let (i, j) = self.coords(k);
            self.is_boundary(i, j)
        })
    }

    /// Largest value of the domain Laplacian weight `e^{2 x2}`.
    pub fn max_weight(&self) -> f64 {
        (2.0 * self.x2_max).exp()
    }

    /// Upper bound for the spectral radius of the discrete Laplacian, divided by 4.
    pub fn stiffness(&self) -> f64 {
        let (h1, h2) = (self.h1(), self.h2());
        self.max_weight() / (h1 * h1) + 1.0 / (h2 * h2)
    }

    /// Nearest node to a chart point, if the point lies inside the rectangle.
    pub fn nearest(&self, p: ChartPoint) -> Option<(usize, usize)> {
        if p.x1 < self.x1_min || p.x1 > self.x1_max || p.x2 < self.x2_min || p.x2 > self.x2_max {
            return None;
        }
        let i = ((p.x1 - self.x1_min) / self.h1()).round() as usize;
        let j = ((p.x2 - self.x2_min) / self.h2()).round() as usize;
        Some((i.min(self.n1 - 1), j.min(self.n2 - 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = Grid::new((-2.0, 2.0), (-1.0, 1.0), 9, 11).unwrap();
        assert_eq!(g.h1(), 0.5);
        assert_eq!(g.h2(), 0.2);
        assert_eq!(g.x1(8), 2.0);
        assert_eq!(g.x2(0), -1.0);
        assert_eq!(g.len(), 99);
        let (i, j) = g.coords(g.idx(3, 7));
        assert_eq!((i, j), (3, 7));
        assert_eq!(g.boundary_indices().count(), 2 * 9 + 2 * 11 - 4);
    }

    #[test]
    fn rejects_small_or_degenerate() {
        assert!(Grid::new((0.0, 1.0), (0.0, 1.0), 7, 8).is_err());
        assert!(Grid::new((1.0, 1.0), (0.0, 1.0), 8, 8).is_err());
        assert!(Grid::new((0.0, f64::NAN), (0.0, 1.0), 8, 8).is_err());
    }

    #[test]
    fn refinement_halves_spacing() {
        let g = Grid::new((-2.0, 2.0), (-1.0, 1.0), 9, 11).unwrap();
        let r = g.refined();
        assert!((r.h1() - g.h1() / 2.0).abs() < 1e-15);
        assert!((r.h2() - g.h2() / 2.0).abs() < 1e-15);
        assert_eq!(r.x1(2 * 3), g.x1(3));
    }
}
