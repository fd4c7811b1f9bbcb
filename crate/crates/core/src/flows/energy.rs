//! Energies along a trajectory and the dissipation monitor.

use super::integrate::Stepper;
use super::params::FlowKind;
use super::state::FlowState;
use crate::error::Result;
use crate::fields::norms::{integrate, tangent_magnitudes};
use crate::fields::{discrete_dirichlet_energy, pullback_covariant_derivative, tension_field, Dir, MapField, TangentField};
use crate::geometry::metric_at;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    pub tau_l2: f64,
    pub dissipation_residual: f64,
    /// Trapezoid average of the dissipation rate over the last interval.
    #[serde(skip)]
    pub dissipation_rate: f64,
}

impl EnergyReport {
    /// Residual relative to the dissipation rate, floored at `eps`.
    pub fn relative_residual(&self, eps: f64) -> f64 {
        self.dissipation_residual / self.dissipation_rate.abs().max(eps)
    }
}

/// Dirichlet energy `E1 = (1/2) int |du|^2`, in the edge-based form whose
/// gradient is the discrete tension.
pub fn dirichlet_energy(u: &MapField) -> f64 {
    discrete_dirichlet_energy(u)
}

/// `(1/2) int |V|^2`.
pub fn kinetic_energy(v: &TangentField, u: &MapField) -> Result<f64> {
    let m = tangent_magnitudes(v, u)?;
    Ok(0.5 * integrate(&u.grid, &m.iter().map(|x| x * x).collect::<Vec<_>>()))
}

/// Pointwise `h^{ij} <nabla_i V, nabla_j V>_g`.
pub fn covariant_gradient_sq(v: &TangentField, u: &MapField) -> Result<Vec<f64>> {
    let g = u.grid;
    let d1 = pullback_covariant_derivative(v, u, Dir::X1)?;
    let d2 = pullback_covariant_derivative(v, u, Dir::X2)?;
    Ok((0..g.len())
        .map(|k| {
            let (_, j) = g.coords(k);
            let m = metric_at(u.point(k));
            (2.0 * g.x2(j)).exp() * m.inner(d1.at(k), d1.at(k)) + m.inner(d2.at(k), d2.at(k))
        })
        .collect())
}

/// `(1/2) int |nabla V|^2`.
pub fn gradient_energy(v: &TangentField, u: &MapField) -> Result<f64> {
    Ok(0.5 * integrate(&u.grid, &covariant_gradient_sq(v, u)?))
}

/// Squared L2 norm of `tau(u)` and the flow's dissipation rate `int <tau, u_t>`.
fn tau_and_rate(stepper: &mut Stepper, s: &FlowState) -> Result<(f64, f64)> {
    let tau = tension_field(&s.u);
    let m = tangent_magnitudes(&tau, &s.u)?;
    let t2 = integrate(&s.u.grid, &m.iter().map(|x| x * x).collect::<Vec<_>>());
    let rate = match stepper.kind {
        FlowKind::Heat => t2,
        FlowKind::LandauLifshitz => stepper.params.alpha * t2,
        FlowKind::Wave => {
            let v = stepper.velocity(s);
            let ip: Vec<f64> = (0..s.u.grid.len())
                .map(|k| metric_at(s.u.point(k)).inner(tau.at(k), v.at(k)))
                .collect();
            integrate(&s.u.grid, &ip)
        }
    };
    Ok((t2, rate))
}

/// Energies at `state`; with `prev`, also the dissipation residual
/// `|dE1/dt + alpha ||tau||^2|` over the interval. The rate is the one
/// accumulated by the integrator between the two states; when both states
/// carry none it falls back to the trapezoid average of the endpoints.
pub fn energy_report(
    state: &FlowState,
    prev: Option<&FlowState>,
    stepper: &mut Stepper,
) -> Result<EnergyReport> {
    let v = stepper.velocity(state);
    let e1 = dirichlet_energy(&state.u);
    let (t2, rate) = tau_and_rate(stepper, state)?;
    let mut rep = EnergyReport {
        t: state.t,
        e1,
        e2: kinetic_energy(&v, &state.u)?,
        e3: gradient_energy(&v, &state.u)?,
        tau_l2: t2.sqrt(),
        dissipation_residual: 0.0,
        dissipation_rate: rate,
    };
    if let Some(p) = prev {
        let dt = state.t - p.t;
        let avg = if state.dissipated != p.dissipated {
            (state.dissipated - p.dissipated) / dt
        } else {
            let (_, rate_prev) = tau_and_rate(stepper, p)?;
            0.5 * (rate + rate_prev)
        };
        rep.dissipation_rate = avg;
        rep.dissipation_residual = ((e1 - dirichlet_energy(&p.u)) / dt + avg).abs();
    }
    Ok(rep)
}

/// Reports for every checkpoint of a trajectory.
pub fn energy_history(states: &[FlowState], stepper: &mut Stepper) -> Result<Vec<EnergyReport>> {
    let mut out = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        let prev = if i > 0 { Some(&states[i - 1]) } else { None };
        out.push(energy_report(s, prev, stepper)?);
    }
    Ok(out)
}
