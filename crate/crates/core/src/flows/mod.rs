//! Time integration of the Landau-Lifshitz flow, the harmonic-map heat flow
//! and the damped wave approximation, with energy monitors.

pub mod bochner;
pub mod energy;
pub mod integrate;
pub mod params;
pub mod rhs;
pub mod state;

pub use bochner::{bochner_monitor, BochnerReport};
pub use energy::{dirichlet_energy, energy_history, energy_report, EnergyReport};
pub use integrate::{evolve, step, wave_initial_state, Rk4, Stepper};
pub use params::{FlowKind, FlowParams};
pub use rhs::{heat_rhs, ll_rhs, wave_rhs, RhsWorkspace};
pub use state::{FlowState, Trajectory};
