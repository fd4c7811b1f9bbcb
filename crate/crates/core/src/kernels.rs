//! Heat-kernel envelope on the hyperbolic plane and smoothing diagnostics
//! for the discrete heat semigroup.
//!
//! The envelope is known only up to absolute constants, so it is used for
//! one-sided comparisons. The semigroup itself is computed by evolving the
//! discrete heat equation with zero Dirichlet data on the truncated
//! rectangle, which can only speed up decay compared with the full plane.

use crate::error::{Error, Result};
use crate::fields::norms::{lp_norm_scalar, Norm};
use crate::fields::ops::{conservative_laplace_into, TensionCoefficients};
use crate::fields::{Grid, ScalarField};
use crate::geometry::{geodesic_distance, ChartPoint};
use crate::harmonic::bump;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    /// Heat time.
    pub t: f64,
    /// Geodesic distance.
    pub rho: f64,
}

impl KernelQuery {
    pub fn new(t: f64, rho: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("heat time must be positive, got {t}")));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("distance must be non-negative, got {rho}")));
        }
        Ok(Self { t, rho })
    }
}

/// `t^{-1} e^{-t/4} e^{-rho^2/(4t)} e^{-rho/2} (1 + rho + t)^{-1/2} (1 + rho)`.
pub fn kernel_envelope(q: KernelQuery) -> f64 {
    let KernelQuery { t, rho } = q;
    (-0.25 * t - rho * rho / (4.0 * t) - 0.5 * rho).exp() * (1.0 + rho) / (t * (1.0 + rho + t).sqrt())
}

/// Largest forward-Euler step for which the update has non-negative
/// coefficients.
pub fn monotone_dt(grid: &Grid) -> f64 {
    let c = TensionCoefficients::new(grid);
    let top = c.horizontal.iter().fold(0.0, |m: f64, v| m.max(*v));
    1.0 / (2.0 * top + c.north + c.south)
}

/// Forward-Euler evolution of `df/ds = Delta f` with the divergence-form
/// Laplacian, boundary ring held at zero.
pub struct HeatSemigroup {
    grid: Grid,
    coeffs: TensionCoefficients,
    dt: f64,
    lap: Vec<f64>,
}

impl HeatSemigroup {
    /// `dt = None` picks the monotone bound; an explicit `dt` above it is an
    /// error.
    pub fn new(grid: Grid, dt: Option<f64>) -> Result<Self> {
        let bound = monotone_dt(&grid);
        let dt = dt.unwrap_or(bound);
        if !(dt > 0.0 && dt <= bound) {
            return Err(Error::InvalidParam {
                field: "dt".into(),
                reason: format!("step {dt:e} violates the monotone bound {bound:e}"),
            });
        }
        if grid.h2() > 2.0 {
            return Err(Error::InvalidParam {
                field: "grid".into(),
                reason: "x2 spacing above 2 breaks monotonicity".into(),
            });
        }
        Ok(Self {
            grid,
            coeffs: TensionCoefficients::new(&grid),
            dt,
            lap: vec![0.0; grid.len()],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances by `steps` Euler steps of size `dt`.
    pub fn advance(&mut self, f: &mut [f64], dt: f64, steps: usize) {
        for _ in 0..steps {
            conservative_laplace_into(&self.grid, &self.coeffs, f, &mut self.lap);
            for (v, l) in f.iter_mut().zip(&self.lap) {
                *v += dt * l;
            }
        }
    }

    /// Step count and step size covering `s` without exceeding `dt`.
    pub fn plan(&self, s: f64) -> (usize, f64) {
        let steps = (s / self.dt).ceil().max(1.0) as usize;
        (steps, s / steps as f64)
    }
}

fn zero_ring(grid: &Grid, f: &mut [f64]) {
    for k in grid.boundary_indices().collect::<Vec<_>>() {
        f[k] = 0.0;
    }
}

/// `e^{s Delta} f` on the truncated rectangle.
pub fn apply_heat_semigroup(f: &ScalarField, s: f64, dt: Option<f64>) -> Result<ScalarField> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("semigroup time must be positive, got {s}")));
    }
    if !f.is_finite() {
        return Err(Error::NonFinite { t: 0.0, detail: "input field".into() });
    }
    let mut sg = HeatSemigroup::new(f.grid, dt)?;
    let mut v = f.values.clone();
    zero_ring(&f.grid, &mut v);
    let (steps, h) = sg.plan(s);
    sg.advance(&mut v, h, steps);
    Ok(ScalarField { grid: f.grid, values: v })
}

/// Smooth compactly supported bump of geodesic radius `radius` around `center`.
pub fn standard_bump(grid: Grid, center: ChartPoint, radius: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x1, x2| {
        bump(geodesic_distance(ChartPoint::new(x1, x2), center) / radius)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub s: f64,
    pub sup_norm: f64,
    pub l1_norm: f64,
    /// `e^{-s/4} s^{-1} ||f||_1`.
    pub envelope: f64,
    /// `sup_norm / envelope`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub rows: Vec<RatioRow>,
    /// `||e^{s Delta} f||_inf / ||f||_inf` after one step.
    pub small_s_sup_ratio: f64,
    /// Largest `||e^{s Delta} f||_1 / ||e^{s' Delta} f||_1` over consecutive
    /// steps; at most one when mass never grows.
    pub max_l1_growth: f64,
    /// Smallest nodal value seen during the evolution.
    pub min_value: f64,
    /// `int_0^S ||e^{t Delta} f||_inf^2 dt` at `S` equal to the largest sample.
    pub partial_integral: f64,
    /// The same integral up to twice the largest sample.
    pub partial_integral_doubled: f64,
    /// Share of the doubled integral contributed by `[S, 2S]`.
    pub tail_fraction: f64,
}

/// Evolves `f` to twice the largest sample time, recording the decay
/// ratios at each sample and the squared-sup integral.
pub fn smoothing_diagnostics(f: &ScalarField, s_samples: &[f64]) -> Result<SmoothingReport> {
    if s_samples.is_empty() || s_samples.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParam {
            field: "s_samples".into(),
            reason: "need at least one positive sample".into(),
        });
    }
    let mut samples = s_samples.to_vec();
    samples.sort_by(f64::total_cmp);
    let s_top = *samples.last().unwrap();
    let mut sg = HeatSemigroup::new(f.grid, None)?;
    let (steps, h) = sg.plan(2.0 * s_top);
    let mut v = f.values.clone();
    zero_ring(&f.grid, &mut v);
    let l1_0 = lp_norm_scalar(&ScalarField { grid: f.grid, values: v.clone() }, Norm::L1);
    let sup0 = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let sup = |v: &[f64]| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let mut rows = Vec::new();
    let mut next = 0;
    let mut integral = 0.0;
    let mut integral_at_top = f64::NAN;
    let mut prev_sq = sup0 * sup0;
    let mut prev_l1 = l1_0;
    let mut growth = 0.0f64;
    let mut min_value = v.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    let mut small = f64::NAN;
    for step in 1..=steps {
        sg.advance(&mut v, h, 1);
        let s = step as f64 * h;
        let m = sup(&v);
        integral += 0.5 * h * (prev_sq + m * m);
        prev_sq = m * m;
        let l1 = lp_norm_scalar(&ScalarField { grid: f.grid, values: v.clone() }, Norm::L1);
        growth = growth.max(l1 / prev_l1);
        prev_l1 = l1;
        min_value = v.iter().fold(min_value, |a, x| a.min(*x));
        if step == 1 {
            small = m / sup0;
        }
        while next < samples.len() && s >= samples[next] - 0.5 * h {
            let env = (-0.25 * samples[next]).exp() / samples[next] * l1_0;
            rows.push(RatioRow {
                s: samples[next],
                sup_norm: m,
                l1_norm: l1,
                envelope: env,
                ratio: m / env,
            });
            next += 1;
        }
        if integral_at_top.is_nan() && s >= s_top - 0.5 * h {
            integral_at_top = integral;
        }
    }
    Ok(SmoothingReport {
        rows,
        small_s_sup_ratio: small,
        max_l1_growth: growth,
        min_value,
        partial_integral: integral_at_top,
        partial_integral_doubled: integral,
        tail_fraction: (integral - integral_at_top) / integral,
    })
}
