//! Classical four-stage Runge-Kutta over flat state buffers.

use super::params::{FlowKind, FlowParams};
use super::rhs::{ll_rhs, RhsWorkspace};
use super::state::{FlowState, Trajectory};
use crate::error::{Error, Result};
use crate::fields::TangentField;

/// Scratch space for one RK4 step.
#[derive(Clone, Debug)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; len]),
            tmp: vec![0.0; len],
        }
    }

    pub fn step(&mut self, y: &mut [f64], dt: f64, mut f: impl FnMut(&[f64], &mut [f64])) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        f(y, k1);
        for ((t, &a), &b) in tmp.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *t = a + 0.5 * dt * b;
        }
        f(tmp, k2);
        for ((t, &a), &b) in tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *t = a + 0.5 * dt * b;
        }
        f(tmp, k3);
        for ((t, &a), &b) in tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *t = a + dt * b;
        }
        f(tmp, k4);
        let c = dt / 6.0;
        for i in 0..y.len() {
            y[i] += c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }
}

/// Reusable integrator for one flow on one grid.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub kind: FlowKind,
    pub params: FlowParams,
    ws: RhsWorkspace,
    rk: Rk4,
    buf: Vec<f64>,
}

impl Stepper {
    pub fn new(kind: FlowKind, params: FlowParams, grid: crate::fields::Grid) -> Result<Self> {
        params.validate(kind)?;
        let len = match kind {
            FlowKind::Wave => 4 * grid.len(),
            _ => 2 * grid.len(),
        };
        Ok(Self {
            kind,
            params,
            ws: RhsWorkspace::new(grid),
            rk: Rk4::new(len),
            buf: vec![0.0; len],
        })
    }

    pub fn admissible_dt(&self) -> f64 {
        self.params.admissible_dt(self.kind, &self.ws.grid)
    }

    /// Advances a flat state buffer by `steps` steps of size `dt` and
    /// returns the dissipation `int <tau, u_t>` accumulated over the steps,
    /// integrated with the RK4 stage weights.
    pub fn advance(&mut self, y: &mut [f64], dt: f64, steps: usize) -> f64 {
        let (kind, p) = (self.kind, self.params);
        let ws = &mut self.ws;
        let weights = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
        let n2 = 2 * ws.grid.len();
        let mut stage = 0usize;
        let mut acc = 0.0;
        for _ in 0..steps {
            stage = 0;
            match kind {
                FlowKind::Heat => self.rk.step(y, dt, |a, out| {
                    ws.ll(a, 1.0, 0.0, out);
                    acc += weights[stage] * ws.tau_sq();
                    stage += 1;
                }),
                FlowKind::LandauLifshitz => self.rk.step(y, dt, |a, out| {
                    ws.ll(a, p.alpha, p.beta, out);
                    if p.alpha != 0.0 {
                        acc += weights[stage] * p.alpha * ws.tau_sq();
                    }
                    stage += 1;
                }),
                FlowKind::Wave => self.rk.step(y, dt, |a, out| {
                    ws.wave(a, &p, out);
                    acc += weights[stage] * ws.tau_dot(&a[n2..]);
                    stage += 1;
                }),
            }
        }
        debug_assert!(steps == 0 || stage == 4);
        acc
    }

    /// Velocity field of a state: the flow right-hand side, or `ut` for the wave scheme.
    pub fn velocity(&mut self, state: &FlowState) -> TangentField {
        let g = state.u.grid;
        match (self.kind, &state.ut) {
            (FlowKind::Wave, Some(v)) => v.clone(),
            _ => {
                let (a, b) = match self.kind {
                    FlowKind::Heat => (1.0, 0.0),
                    _ => (self.params.alpha, self.params.beta),
                };
                let mut out = TangentField::zeros(g);
                self.ws.ll(&state.u.data, a, b, &mut out.data);
                out
            }
        }
    }

    fn pack(&mut self, state: &FlowState) {
        let n2 = 2 * state.u.grid.len();
        self.buf[..n2].copy_from_slice(&state.u.data);
        if self.kind == FlowKind::Wave {
            match &state.ut {
                Some(v) => self.buf[n2..].copy_from_slice(&v.data),
                None => self.buf[n2..].iter_mut().for_each(|x| *x = 0.0),
            }
        }
    }

    fn unpack(&self, state: &mut FlowState) {
        let g = state.u.grid;
        let n2 = 2 * g.len();
        state.u.data.copy_from_slice(&self.buf[..n2]);
        if self.kind == FlowKind::Wave {
            state.ut = Some(TangentField {
                grid: g,
                data: self.buf[n2..].to_vec(),
            });
        }
    }

    /// Advances `state` by `steps` steps of `dt` and checks finiteness.
    pub fn advance_state(&mut self, state: &mut FlowState, dt: f64, steps: usize) -> Result<()> {
        self.pack(state);
        let mut y = std::mem::take(&mut self.buf);
        let work = self.advance(&mut y, dt, steps);
        self.buf = y;
        if let Some(i) = self.buf.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                t: state.t + dt * steps as f64,
                detail: format!("entry {i} of the state vector; dt = {dt:e} may violate the stability bound"),
            });
        }
        self.unpack(state);
        state.t += dt * steps as f64;
        state.dissipated += work;
        Ok(())
    }

    /// Evolves to `t_final` storing `checkpoints` equally spaced states after
    /// the initial one. The step is the largest admissible one dividing each
    /// segment evenly, or `dt_max` if that is smaller.
    pub fn evolve(
        &mut self,
        initial: &FlowState,
        t_final: f64,
        checkpoints: usize,
        dt_max: Option<f64>,
    ) -> Result<Trajectory> {
        if !(t_final > 0.0) || checkpoints == 0 {
            return Err(Error::InvalidParam {
                field: "t_final".into(),
                reason: "need t_final > 0 and at least one checkpoint".into(),
            });
        }
        let seg = t_final / checkpoints as f64;
        let cap = dt_max.map_or(self.admissible_dt(), |d| d.min(self.admissible_dt()));
        let steps = (seg / cap).ceil().max(1.0) as usize;
        let dt = seg / steps as f64;
        let mut traj = Trajectory {
            states: vec![initial.clone()],
            dt,
        };
        let mut cur = initial.clone();
        let t0 = initial.t;
        for c in 1..=checkpoints {
            self.advance_state(&mut cur, dt, steps)?;
            cur.t = t0 + seg * c as f64;
            traj.states.push(cur.clone());
        }
        Ok(traj)
    }
}

/// One RK4 step.
pub fn step(state: &FlowState, kind: FlowKind, params: &FlowParams, dt: f64) -> Result<FlowState> {
    let mut s = Stepper::new(kind, *params, state.u.grid)?;
    let mut out = state.clone();
    s.advance_state(&mut out, dt, 1)?;
    Ok(out)
}

/// Evolves with the admissible step and `checkpoints` stored states.
pub fn evolve(
    state: &FlowState,
    kind: FlowKind,
    params: &FlowParams,
    t_final: f64,
    checkpoints: usize,
) -> Result<Trajectory> {
    Stepper::new(kind, *params, state.u.grid)?.evolve(state, t_final, checkpoints, None)
}

/// Initial state of the wave scheme: `u_t(0) = ll_rhs(u0)`.
pub fn wave_initial_state(u0: &crate::fields::MapField, params: &FlowParams) -> FlowState {
    let v = ll_rhs(u0, params.alpha, params.beta);
    FlowState::with_velocity(u0.clone(), v)
}
