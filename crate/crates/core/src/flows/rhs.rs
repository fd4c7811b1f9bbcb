//! Right-hand sides of the three evolution equations.

use super::params::FlowParams;
use super::state::FlowState;
use crate::fields::norms::quadrature_weights;
use crate::fields::ops::{tension_into, TensionCoefficients};
use crate::fields::{Grid, MapField, TangentField};

/// Buffers shared by repeated right-hand-side evaluations on one grid.
#[derive(Clone, Debug)]
pub struct RhsWorkspace {
    pub grid: Grid,
    coeffs: TensionCoefficients,
    quad: Vec<f64>,
    boundary: Vec<usize>,
    q: Vec<f64>,
    tau: Vec<f64>,
}

impl RhsWorkspace {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: TensionCoefficients::new(&grid),
            quad: quadrature_weights(&grid),
            boundary: grid.boundary_indices().collect(),
            q: vec![0.0; grid.len()],
            tau: vec![0.0; 2 * grid.len()],
        }
    }

    /// `alpha tau - beta J tau` of the flat map buffer `u` into `out`.
    pub fn ll(&mut self, u: &[f64], alpha: f64, beta: f64, out: &mut [f64]) {
        tension_into(&self.grid, &self.coeffs, u, &mut self.q, &mut self.tau);
        combine_ll(self.grid.len(), &self.q, &self.tau, alpha, beta, out);
    }

    /// `int |tau|^2` for the map of the last evaluation.
    pub fn tau_sq(&self) -> f64 {
        let n = self.grid.len();
        let mut s = 0.0;
        for k in 0..n {
            let (a, b) = (self.q[k] * self.tau[k], self.tau[n + k]);
            s += self.quad[k] * (a * a + b * b);
        }
        s
    }

    /// `int <tau, v>_g` for the map of the last evaluation.
    pub fn tau_dot(&self, v: &[f64]) -> f64 {
        let n = self.grid.len();
        let mut s = 0.0;
        for k in 0..n {
            let q2 = self.q[k] * self.q[k];
            s += self.quad[k] * (q2 * self.tau[k] * v[k] + self.tau[n + k] * v[n + k]);
        }
        s
    }

    /// Wave system on `y = [u | v]`, writing `[du/dt | dv/dt]`.
    pub fn wave(&mut self, y: &[f64], p: &FlowParams, out: &mut [f64]) {
        let n = self.grid.len();
        let (u, v) = y.split_at(2 * n);
        tension_into(&self.grid, &self.coeffs, u, &mut self.q, &mut self.tau);
        let (du, dv) = out.split_at_mut(2 * n);
        du.copy_from_slice(v);
        let z2 = p.alpha * p.alpha + p.beta * p.beta;
        let (cj, cv) = (p.alpha * p.beta / z2, p.alpha * p.alpha / z2);
        let inv_delta = 1.0 / p.delta;
        for k in 0..n {
            let (v1, v2) = (v[k], v[n + k]);
            let q = self.q[k];
            // J v = (-e^{u2} v2, e^{-u2} v1)
            let (jv1, jv2) = (-v2 / q, q * v1);
            let g1 = 2.0 * v1 * v2;
            let g2 = -q * q * v1 * v1;
            dv[k] = g1 + inv_delta * (p.alpha * self.tau[k] - cj * jv1 - cv * v1);
            dv[n + k] = g2 + inv_delta * (p.alpha * self.tau[n + k] - cj * jv2 - cv * v2);
        }
        for &k in &self.boundary {
            du[k] = 0.0;
            du[n + k] = 0.0;
            dv[k] = 0.0;
            dv[n + k] = 0.0;
        }
    }
}

/// `q = e^{-u2}` per node.
fn combine_ll(n: usize, q: &[f64], tau: &[f64], alpha: f64, beta: f64, out: &mut [f64]) {
    for k in 0..n {
        let (t1, t2) = (tau[k], tau[n + k]);
        // -beta J tau = (beta e^{u2} t2, -beta e^{-u2} t1)
        out[k] = alpha * t1 + beta * (t2 / q[k]);
        out[n + k] = alpha * t2 - beta * (q[k] * t1);
    }
}

/// Landau-Lifshitz velocity `alpha tau(u) - beta J tau(u)`.
pub fn ll_rhs(u: &MapField, alpha: f64, beta: f64) -> TangentField {
    let mut ws = RhsWorkspace::new(u.grid);
    let mut out = TangentField::zeros(u.grid);
    ws.ll(&u.data, alpha, beta, &mut out.data);
    out
}

/// Heat-flow velocity `tau(u)`.
pub fn heat_rhs(u: &MapField) -> TangentField {
    ll_rhs(u, 1.0, 0.0)
}

/// Wave-scheme right-hand side `(du/dt, dv/dt)` with `v = state.ut`.
pub fn wave_rhs(state: &FlowState, p: &FlowParams) -> (TangentField, TangentField) {
    let g = state.u.grid;
    let mut y = state.u.data.clone();
    match &state.ut {
        Some(v) => y.extend_from_slice(&v.data),
        None => y.resize(4 * g.len(), 0.0),
    }
    let mut out = vec![0.0; 4 * g.len()];
    RhsWorkspace::new(g).wave(&y, p, &mut out);
    let dv = out.split_off(2 * g.len());
    (
        TangentField { grid: g, data: out },
        TangentField { grid: g, data: dv },
    )
}
