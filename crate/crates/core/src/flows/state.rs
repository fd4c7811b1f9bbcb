use crate::fields::{MapField, TangentField};

/// A point of a trajectory. `ut` is carried by the wave scheme only.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub u: MapField,
    pub ut: Option<TangentField>,
    pub t: f64,
    /// Accumulated `int_0^t int <tau, u_t>` along the integration.
    pub dissipated: f64,
}

impl FlowState {
    pub fn new(u: MapField) -> Self {
        Self {
            u,
            ut: None,
            t: 0.0,
            dissipated: 0.0,
        }
    }

    pub fn with_velocity(u: MapField, ut: TangentField) -> Self {
        Self {
            u,
            ut: Some(ut),
            t: 0.0,
            dissipated: 0.0,
        }
    }
}

/// Checkpointed states, the first one being the initial state.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    /// Integration step used between checkpoints.
    pub dt: f64,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}
