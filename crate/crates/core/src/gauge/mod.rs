//! The caloric gauge: heat towers in the auxiliary time `s`, a frame that
//! is parallel along `s` and pinned to the global frame at the limit map,
//! and the complex differential fields and real connection coefficients
//! expressed in that frame.

pub mod bundle;
pub mod connection;
pub mod family;
pub mod frame;
pub mod residuals;
pub mod tower;

pub use bundle::{
    connection_between, connection_from_frame, differential_fields, frame_components, wedge,
    GaugeBundle, Links,
};
pub use connection::{connection_from_integral, IntegralConnection};
pub use family::{evolution_residuals, CaloricFamily, EvolutionRow};
pub use frame::{caloric_frames, limit_gauge_rotation, transport_frame, Frame};
pub use residuals::{gauge_residuals, interior_l2, z_of, GaugeResiduals};
pub use tower::{build_heat_tower, build_heat_tower_fixed, heat_limit, HeatTower, TowerSpec};
